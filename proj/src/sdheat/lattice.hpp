#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sdheat/errors.hpp"

namespace sdheat {

enum class Boundary { periodic, zero };

using MultiIndex = std::vector<int>;

// number of components equal to zero
int zeros_count(const MultiIndex& a);

// Lattice box {-N..N}^d with spacing dx. Sites are stored with direction 1
// varying fastest.
struct GridSpec {
    double dx = 1.0;
    int dim = 1;
    int radius = 1;
    Boundary boundary = Boundary::periodic;

    GridSpec() = default;
    GridSpec(double dx, int dim, int radius, Boundary b = Boundary::periodic);

    int side() const { return 2 * radius + 1; }
    std::size_t sites() const;
    double cell() const;  // dx^d

    bool inside(const MultiIndex& a) const;
    std::size_t flat(const MultiIndex& a) const;  // a must be inside
    MultiIndex index(std::size_t k) const;
    int coord(std::size_t k, int j) const;  // component j (0-based) of site k
    std::size_t stride(int j) const;

    // boundary rule: wrapped flat index, or -1 outside under zero extension
    long resolve(const MultiIndex& a) const;
    // site k moved by s along direction j (0-based); -1 if it leaves the box
    long shift(std::size_t k, int j, int s) const;

    bool operator==(const GridSpec&) const = default;
};

class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0);
    Field(const GridSpec& g, std::vector<double> values);

    static Field dirac(const GridSpec& g, const MultiIndex& at);
    static Field from_function(const GridSpec& g,
                               const std::function<double(const MultiIndex&)>& f);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t k) const { return v_[k]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double at(const MultiIndex& a) const;  // boundary rule applies outside the box
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

private:
    GridSpec grid_;
    std::vector<double> v_;
};

// F_{alpha,beta}; dense row-major (alpha rows) or lazily evaluated with a budget
class TwoPointField {
public:
    using Evaluator = std::function<double(std::size_t, std::size_t)>;
    static constexpr std::size_t dense_limit = std::size_t(1) << 26;

    TwoPointField() = default;
    explicit TwoPointField(const GridSpec& g);
    TwoPointField(const GridSpec& g, std::vector<double> dense);
    static TwoPointField lazy(const GridSpec& g, Evaluator f, std::size_t budget);
    static TwoPointField dirac(const GridSpec& g);

    const GridSpec& grid() const { return grid_; }
    bool is_dense() const { return !eval_; }
    std::size_t n() const { return grid_.sites(); }
    double operator()(std::size_t a, std::size_t b) const;
    double& ref(std::size_t a, std::size_t b);
    TwoPointField densify() const;
    const std::vector<double>& data() const { return v_; }
    std::size_t evaluations() const { return used_ ? used_->load() : 0; }

private:
    GridSpec grid_;
    std::vector<double> v_;
    Evaluator eval_;
    std::size_t budget_ = 0;
    std::shared_ptr<std::atomic<std::size_t>> used_;
};

// directions j are 1-based as in grad_+^j
Field forward_diff(const Field& f, int j);
Field backward_diff(const Field& f, int j);
Field laplacian_dir(const Field& f, int j);

TwoPointField convolve_2p(const TwoPointField& F, const TwoPointField& G);
Field convolve_translation(const Field& f, const Field& g);

constexpr double inf_norm = -1.0;  // pass as p for the sup norm
double lp_norm(const Field& f, double p);
// beta-norm (p2) first, then alpha-norm (p1)
double mixed_norm(const TwoPointField& F, double p1, double p2);

void write_csv(std::ostream& os, const Field& f);
void write_csv(std::ostream& os, const TwoPointField& F);
// reads `alpha_1..alpha_d,value`; dim and radius come from the file
Field read_field_csv(std::istream& is, double dx, Boundary b);

// write to path.tmp then rename
void atomic_write(const std::string& path, const std::function<void(std::ostream&)>& body);

}  // namespace sdheat
