#include "sdheat/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace sdheat {

Coefficients::Coefficients(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == g.sites() * static_cast<std::size_t>(g.dim),
            "coefficient array size does not match the grid");
    c_min = *std::min_element(values.begin(), values.end());
    c_max = *std::max_element(values.begin(), values.end());
    require(std::isfinite(c_max) && c_min > 0, "coefficients must be positive and finite");
    lip = 0;
    for (std::size_t k = 0; k < g.sites(); ++k)
        for (int j = 0; j < g.dim; ++j) {
            long n = g.shift(k, j, 1);
            if (n < 0) continue;
            for (int i = 0; i < g.dim; ++i)
                lip = std::max(lip, std::abs((*this)(k, i) - (*this)(static_cast<std::size_t>(n), i)) / g.dx);
        }
}

Coefficients Coefficients::from_function(const GridSpec& g,
                                         const std::function<double(const std::vector<double>&, int)>& fn) {
    std::vector<double> v(g.sites() * g.dim);
    std::vector<double> x(g.dim);
    for (std::size_t k = 0; k < g.sites(); ++k) {
        for (int j = 0; j < g.dim; ++j) x[j] = g.coord(k, j) * g.dx;
        for (int j = 0; j < g.dim; ++j) v[k * g.dim + j] = fn(x, j);
    }
    return Coefficients(g, std::move(v));
}

Coefficients Coefficients::constant(const GridSpec& g, double c) {
    return Coefficients(g, std::vector<double>(g.sites() * g.dim, c));
}

Coefficients Coefficients::sine(const GridSpec& g, double a, double b, double k) {
    return from_function(g, [&](const std::vector<double>& x, int) {
        return a + b * std::sin(2.0 * std::numbers::pi * k * x[0]);
    });
}

namespace {

std::vector<double> numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw ArgumentError("bad number in coefficient spec: " + cell);
        }
        require(used == cell.size(), "bad number in coefficient spec: " + cell);
        out.push_back(v);
    }
    return out;
}

Coefficients from_csv(const GridSpec& g, const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open coefficient file " + path);
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "empty coefficient file");
    const int cols = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
    const int vals = cols - g.dim;
    require(vals == 1 || vals == g.dim, "coefficient CSV needs a value column or c_1..c_d");
    std::vector<double> v(g.sites() * g.dim, 0.0);
    std::vector<char> seen(g.sites(), 0);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        MultiIndex a(g.dim);
        for (int j = 0; j < g.dim; ++j) {
            require(static_cast<bool>(std::getline(ss, cell, ',')), "short coefficient row");
            a[j] = static_cast<int>(numbers(cell).at(0));
        }
        require(g.inside(a), "coefficient row outside the grid");
        const std::size_t k = g.flat(a);
        for (int j = 0; j < vals; ++j) {
            require(static_cast<bool>(std::getline(ss, cell, ',')), "short coefficient row");
            v[k * g.dim + j] = numbers(cell).at(0);
        }
        if (vals == 1)
            for (int j = 1; j < g.dim; ++j) v[k * g.dim + j] = v[k * g.dim];
        seen[k] = 1;
    }
    require(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }),
            "coefficient file does not cover the grid");
    return Coefficients(g, std::move(v));
}

}  // namespace

Coefficients Coefficients::parse(const GridSpec& g, const std::string& spec) {
    if (spec.rfind("const:", 0) == 0) {
        auto v = numbers(spec.substr(6));
        require(v.size() == 1, "const: takes one value");
        return constant(g, v[0]);
    }
    if (spec.rfind("sine:", 0) == 0) {
        auto v = numbers(spec.substr(5));
        require(v.size() == 3, "sine: takes a,b,k");
        return sine(g, v[0], v[1], v[2]);
    }
    return from_csv(g, spec);
}

Field parse_field(const GridSpec& g, const std::string& spec) {
    auto tail = [&](std::size_t n) { return spec.size() > n ? numbers(spec.substr(n)) : std::vector<double>{}; };
    const double L = g.side() * g.dx;
    if (spec.rfind("const:", 0) == 0) {
        auto v = tail(6);
        require(v.size() == 1, "const: takes one value");
        return Field(g, v[0]);
    }
    if (spec == "dirac" || spec.rfind("dirac:", 0) == 0) {
        auto v = tail(6);
        require(v.empty() || static_cast<int>(v.size()) == g.dim, "dirac: takes one index per direction");
        MultiIndex at(g.dim, 0);
        for (std::size_t j = 0; j < v.size(); ++j) at[j] = static_cast<int>(v[j]);
        require(g.inside(at), "dirac site outside the grid");
        return Field::dirac(g, at);
    }
    if (spec.rfind("gauss:", 0) == 0) {
        auto v = tail(6);
        require(v.size() == 1 && v[0] > 0, "gauss: takes one positive width");
        return Field::from_function(g, [&](const MultiIndex& a) {
            double r2 = 0;
            for (int x : a) r2 += (x * g.dx) * (x * g.dx);
            return std::exp(-r2 / (v[0] * v[0]));
        });
    }
    for (const char* name : {"cos:", "sin:"}) {
        if (spec.rfind(name, 0) != 0) continue;
        auto v = tail(4);
        require(v.size() == 3, std::string(name) + " takes a,b,k");
        const bool c = name[0] == 'c';
        return Field::from_function(g, [&](const MultiIndex& a) {
            const double ph = 2.0 * std::numbers::pi * v[2] * a[0] * g.dx / L;
            return v[0] + v[1] * (c ? std::cos(ph) : std::sin(ph));
        });
    }
    std::ifstream is(spec);
    require(static_cast<bool>(is), "not a field expression or readable CSV: " + spec);
    Field f = read_field_csv(is, g.dx, g.boundary);
    require(f.grid() == g, "field file " + spec + " does not match the grid");
    return f;
}

ConstCoeffs Coefficients::frozen(std::size_t site) const {
    return ConstCoeffs(std::vector<double>(values.begin() + site * grid.dim,
                                           values.begin() + (site + 1) * grid.dim));
}

bool Coefficients::is_constant() const {
    for (std::size_t k = 1; k < grid.sites(); ++k)
        for (int j = 0; j < grid.dim; ++j)
            if ((*this)(k, j) != (*this)(0, j)) return false;
    return true;
}

}  // namespace sdheat
