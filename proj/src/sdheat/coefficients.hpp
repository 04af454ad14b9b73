#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdheat/heat_const.hpp"
#include "sdheat/lattice.hpp"

namespace sdheat {

// diagonal diffusion field c_alpha^j on a grid
struct Coefficients {
    GridSpec grid;
    std::vector<double> values;  // values[site * dim + j]
    double c_min = 0, c_max = 0;
    double lip = 0;  // max nearest-neighbour |c_a - c_b| / |x_a - x_b|

    Coefficients() = default;
    Coefficients(const GridSpec& g, std::vector<double> v);

    // fn(x, j) with x the physical position and j 0-based
    static Coefficients from_function(const GridSpec& g,
                                      const std::function<double(const std::vector<double>&, int)>& fn);
    static Coefficients constant(const GridSpec& g, double c);
    // c(x) = a + b sin(2 pi k x^1) in every direction
    static Coefficients sine(const GridSpec& g, double a, double b, double k);
    // `const:v`, `sine:a,b,k` or a CSV path (alpha columns then `value` or c_1..c_d)
    static Coefficients parse(const GridSpec& g, const std::string& spec);

    double operator()(std::size_t site, int j) const { return values[site * grid.dim + j]; }
    ConstCoeffs frozen(std::size_t site) const;
    bool is_constant() const;
};

// const:v, dirac[:a1,..,ad], gauss:w (exp(-|x|^2/w^2)), cos:a,b,k / sin:a,b,k
// (a + b cos(2 pi k x^1 / L), L the box length) or a CSV path
Field parse_field(const GridSpec& g, const std::string& spec);

}  // namespace sdheat
