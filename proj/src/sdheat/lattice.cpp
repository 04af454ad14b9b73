#include "sdheat/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sdheat {

int zeros_count(const MultiIndex& a) {
    return static_cast<int>(std::count(a.begin(), a.end(), 0));
}

GridSpec::GridSpec(double dx_, int dim_, int radius_, Boundary b)
    : dx(dx_), dim(dim_), radius(radius_), boundary(b) {
    require(std::isfinite(dx) && dx > 0, "grid spacing must be positive");
    require(dim >= 1, "dimension must be at least 1");
    require(radius >= 1, "radius must be at least 1");
}

std::size_t GridSpec::sites() const {
    std::size_t n = 1;
    for (int j = 0; j < dim; ++j) n *= static_cast<std::size_t>(side());
    return n;
}

double GridSpec::cell() const { return std::pow(dx, dim); }

std::size_t GridSpec::stride(int j) const {
    std::size_t s = 1;
    for (int i = 0; i < j; ++i) s *= static_cast<std::size_t>(side());
    return s;
}

bool GridSpec::inside(const MultiIndex& a) const {
    if (static_cast<int>(a.size()) != dim) return false;
    for (int v : a)
        if (v < -radius || v > radius) return false;
    return true;
}

std::size_t GridSpec::flat(const MultiIndex& a) const {
    require(inside(a), "multi-index outside the grid box");
    std::size_t k = 0, s = 1;
    for (int j = 0; j < dim; ++j) {
        k += static_cast<std::size_t>(a[j] + radius) * s;
        s *= static_cast<std::size_t>(side());
    }
    return k;
}

MultiIndex GridSpec::index(std::size_t k) const {
    MultiIndex a(dim);
    for (int j = 0; j < dim; ++j) {
        a[j] = static_cast<int>(k % side()) - radius;
        k /= side();
    }
    return a;
}

int GridSpec::coord(std::size_t k, int j) const {
    return static_cast<int>((k / stride(j)) % side()) - radius;
}

long GridSpec::resolve(const MultiIndex& a) const {
    require(static_cast<int>(a.size()) == dim, "multi-index dimension mismatch");
    long k = 0, s = 1;
    const long n = side();
    for (int j = 0; j < dim; ++j) {
        long c = a[j] + radius;
        if (c < 0 || c >= n) {
            if (boundary == Boundary::zero) return -1;
            c = ((c % n) + n) % n;
        }
        k += c * s;
        s *= n;
    }
    return k;
}

long GridSpec::shift(std::size_t k, int j, int s) const {
    const long n = side();
    const long st = static_cast<long>(stride(j));
    const long c = static_cast<long>((k / st) % n);
    long c2 = c + s;
    if (c2 < 0 || c2 >= n) {
        if (boundary == Boundary::zero) return -1;
        c2 = ((c2 % n) + n) % n;
    }
    return static_cast<long>(k) + (c2 - c) * st;
}

Field::Field(const GridSpec& g, double fill) : grid_(g), v_(g.sites(), fill) {}

Field::Field(const GridSpec& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    require(v_.size() == g.sites(), "field size does not match grid");
}

Field Field::dirac(const GridSpec& g, const MultiIndex& at) {
    Field f(g);
    f[g.flat(at)] = 1.0 / g.cell();
    return f;
}

Field Field::from_function(const GridSpec& g,
                           const std::function<double(const MultiIndex&)>& fn) {
    Field f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = fn(g.index(k));
    return f;
}

double Field::at(const MultiIndex& a) const {
    long k = grid_.resolve(a);
    return k < 0 ? 0.0 : v_[static_cast<std::size_t>(k)];
}

TwoPointField::TwoPointField(const GridSpec& g) : grid_(g) {
    const std::size_t n = g.sites();
    require(n * n <= dense_limit, "two-point field too large for dense storage");
    v_.assign(n * n, 0.0);
}

TwoPointField::TwoPointField(const GridSpec& g, std::vector<double> dense)
    : grid_(g), v_(std::move(dense)) {
    require(v_.size() == g.sites() * g.sites(), "two-point field size mismatch");
}

TwoPointField TwoPointField::lazy(const GridSpec& g, Evaluator f, std::size_t budget) {
    TwoPointField F;
    F.grid_ = g;
    F.eval_ = std::move(f);
    F.budget_ = budget;
    F.used_ = std::make_shared<std::atomic<std::size_t>>(0);
    return F;
}

TwoPointField TwoPointField::dirac(const GridSpec& g) {
    TwoPointField F(g);
    const std::size_t n = g.sites();
    for (std::size_t a = 0; a < n; ++a) F.v_[a * n + a] = 1.0 / g.cell();
    return F;
}

double TwoPointField::operator()(std::size_t a, std::size_t b) const {
    if (eval_) {
        if (used_->fetch_add(1) >= budget_)
            throw ConvergenceError("lazy two-point field evaluation budget exhausted");
        return eval_(a, b);
    }
    return v_[a * n() + b];
}

double& TwoPointField::ref(std::size_t a, std::size_t b) {
    require(!eval_, "cannot write into a lazy two-point field");
    return v_[a * n() + b];
}

TwoPointField TwoPointField::densify() const {
    if (!eval_) return *this;
    TwoPointField D(grid_);
    const std::size_t n = grid_.sites();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) D.v_[a * n + b] = eval_(a, b);
    return D;
}

namespace {

void check_dir(const Field& f, int j) {
    require(j >= 1 && j <= f.grid().dim, "direction index out of range");
}

}  // namespace

Field forward_diff(const Field& f, int j) {
    check_dir(f, j);
    const GridSpec& g = f.grid();
    Field out(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
        long p = g.shift(k, j - 1, 1);
        double fp = p < 0 ? 0.0 : f[static_cast<std::size_t>(p)];
        out[k] = (fp - f[k]) / g.dx;
    }
    return out;
}

Field backward_diff(const Field& f, int j) {
    check_dir(f, j);
    const GridSpec& g = f.grid();
    Field out(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
        long m = g.shift(k, j - 1, -1);
        double fm = m < 0 ? 0.0 : f[static_cast<std::size_t>(m)];
        out[k] = (f[k] - fm) / g.dx;
    }
    return out;
}

Field laplacian_dir(const Field& f, int j) {
    check_dir(f, j);
    const GridSpec& g = f.grid();
    Field out(g);
    const double h2 = g.dx * g.dx;
    for (std::size_t k = 0; k < f.size(); ++k) {
        long p = g.shift(k, j - 1, 1), m = g.shift(k, j - 1, -1);
        double fp = p < 0 ? 0.0 : f[static_cast<std::size_t>(p)];
        double fm = m < 0 ? 0.0 : f[static_cast<std::size_t>(m)];
        out[k] = (fm - 2.0 * f[k] + fp) / h2;
    }
    return out;
}

TwoPointField convolve_2p(const TwoPointField& F, const TwoPointField& G) {
    require(F.grid() == G.grid(), "grid mismatch in two-point convolution");
    const std::size_t n = F.n();
    TwoPointField Fd = F.densify(), Gd = G.densify();
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> A(Fd.data().data(), n, n), B(Gd.data().data(), n, n);
    std::vector<double> out(n * n);
    Eigen::Map<RowMat> C(out.data(), n, n);
    C.noalias() = A * B;
    C *= F.grid().cell();
    return TwoPointField(F.grid(), std::move(out));
}

Field convolve_translation(const Field& f, const Field& g) {
    require(f.grid() == g.grid(), "grid mismatch in convolution");
    const GridSpec& G = f.grid();
    Field out(G);
    const double w = G.cell();
    const int d = G.dim;
    MultiIndex diff(d);
    for (std::size_t a = 0; a < out.size(); ++a) {
        MultiIndex al = G.index(a);
        double s = 0.0;
        for (std::size_t e = 0; e < g.size(); ++e) {
            if (g[e] == 0.0) continue;
            for (int j = 0; j < d; ++j) diff[j] = al[j] - G.coord(e, j);
            s += f.at(diff) * g[e];
        }
        out[a] = s * w;
    }
    return out;
}

namespace {

double lp_of(const double* v, std::size_t n, std::size_t stride, double p, double w) {
    if (p == inf_norm) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i * stride]));
        return m;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(v[i * stride]), p);
    return std::pow(s * w, 1.0 / p);
}

void check_p(double p) {
    require(p == inf_norm || (std::isfinite(p) && p >= 1.0), "norm exponent must be >= 1");
}

}  // namespace

double lp_norm(const Field& f, double p) {
    check_p(p);
    return lp_of(f.values().data(), f.size(), 1, p, f.grid().cell());
}

double mixed_norm(const TwoPointField& F, double p1, double p2) {
    check_p(p1);
    check_p(p2);
    TwoPointField D = F.densify();
    const std::size_t n = D.n();
    std::vector<double> inner(n);
    for (std::size_t a = 0; a < n; ++a)
        inner[a] = lp_of(D.data().data() + a * n, n, 1, p2, F.grid().cell());
    return lp_of(inner.data(), n, 1, p1, F.grid().cell());
}

namespace {

void put(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_csv(std::ostream& os, const Field& f) {
    const GridSpec& g = f.grid();
    for (int j = 1; j <= g.dim; ++j) os << "alpha_" << j << ',';
    os << "value\n";
    for (std::size_t k = 0; k < f.size(); ++k) {
        for (int j = 0; j < g.dim; ++j) os << g.coord(k, j) << ',';
        put(os, f[k]);
        os << '\n';
    }
}

void write_csv(std::ostream& os, const TwoPointField& F) {
    const GridSpec& g = F.grid();
    for (int j = 1; j <= g.dim; ++j) os << "alpha_" << j << ',';
    for (int j = 1; j <= g.dim; ++j) os << "beta_" << j << ',';
    os << "value\n";
    const std::size_t n = g.sites();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            for (int j = 0; j < g.dim; ++j) os << g.coord(a, j) << ',';
            for (int j = 0; j < g.dim; ++j) os << g.coord(b, j) << ',';
            put(os, F(a, b));
            os << '\n';
        }
}

Field read_field_csv(std::istream& is, double dx, Boundary b) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "empty CSV input");
    int cols = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
    int dim = cols - 1;
    require(dim >= 1 && line.rfind("alpha_1", 0) == 0, "CSV header must be alpha_1,...,alpha_d,value");
    std::map<MultiIndex, double> rows;
    int radius = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        MultiIndex a(dim);
        for (int j = 0; j < dim; ++j) {
            require(static_cast<bool>(std::getline(ss, cell, ',')), "short CSV row");
            a[j] = std::stoi(cell);
            radius = std::max(radius, std::abs(a[j]));
        }
        require(static_cast<bool>(std::getline(ss, cell, ',')), "short CSV row");
        rows[a] = std::stod(cell);
    }
    GridSpec g(dx, dim, std::max(radius, 1), b);
    require(rows.size() == g.sites(), "CSV does not cover a full index box");
    Field f(g);
    for (auto& [a, v] : rows) f[g.flat(a)] = v;
    return f;
}

void atomic_write(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(os), "cannot open " + tmp + " for writing");
        try {
            body(os);
        } catch (...) {
            os.close();
            std::filesystem::remove(tmp);
            throw;
        }
        os.flush();
        if (!os) {
            std::filesystem::remove(tmp);
            throw ArgumentError("write failed for " + path);
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sdheat
