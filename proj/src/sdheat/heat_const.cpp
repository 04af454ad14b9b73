#include "sdheat/heat_const.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdheat/bessel.hpp"
#include "sdheat/quadrature.hpp"

namespace sdheat {

ConstCoeffs::ConstCoeffs(std::vector<double> values) : c(std::move(values)) {
    require(!c.empty(), "coefficients need at least one direction");
    for (double v : c) require(std::isfinite(v) && v > 0, "coefficients must be positive");
}

ConstCoeffs ConstCoeffs::isotropic(int dim, double value) {
    return ConstCoeffs(std::vector<double>(dim, value));
}

double ConstCoeffs::cbar() const { return *std::max_element(c.begin(), c.end()); }

namespace {

void check_time(double t) { require(std::isfinite(t) && t >= 0, "time must be nonnegative"); }

void check_dim(const MultiIndex& a, const ConstCoeffs& c) {
    require(static_cast<int>(a.size()) == c.dim(), "multi-index and coefficient dimension differ");
}

}  // namespace

double kernel_1d(long n, double t, double c, double dx) {
    check_time(t);
    require(c > 0 && dx > 0, "c and dx must be positive");
    if (t == 0.0) return n == 0 ? 1.0 / dx : 0.0;
    return iv_scaled(n, 2.0 * c * t / (dx * dx)) / dx;
}

double kernel_nd(const MultiIndex& alpha, double t, const ConstCoeffs& coeffs, double dx) {
    check_dim(alpha, coeffs);
    double v = 1.0;
    for (int j = 0; j < coeffs.dim(); ++j) v *= kernel_1d(alpha[j], t, coeffs.c[j], dx);
    return v;
}

std::complex<double> kernel_spectral_complex(const MultiIndex& alpha, double t,
                                             const ConstCoeffs& coeffs, double dx, int nodes) {
    check_dim(alpha, coeffs);
    check_time(t);
    require(nodes >= 16, "spectral quadrature needs at least 16 nodes");
    std::complex<double> prod = 1.0;
    for (int j = 0; j < coeffs.dim(); ++j) {
        const double q = 4.0 * coeffs.c[j] * t / (dx * dx);
        std::complex<double> s = 0.0;
        for (int k = 0; k < nodes; ++k) {
            const double th = -0.5 + static_cast<double>(k) / nodes;
            const double sn = std::sin(std::numbers::pi * th);
            const double ph = 2.0 * std::numbers::pi * alpha[j] * th;
            s += std::exp(-q * sn * sn) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        prod *= s / static_cast<double>(nodes) / dx;
    }
    return prod;
}

double kernel_spectral(const MultiIndex& alpha, double t, const ConstCoeffs& coeffs, double dx,
                       int nodes) {
    return kernel_spectral_complex(alpha, t, coeffs, dx, nodes).real();
}

double series_tail_bound(const GridSpec& grid, double t, const ConstCoeffs& coeffs, int terms) {
    const double op = 4.0 * grid.dim * coeffs.cbar() / (grid.dx * grid.dx);
    const double x = t * op;
    // x^terms/terms! in logs
    return std::exp(terms * std::log(std::max(x, 1e-300)) - std::lgamma(terms + 1.0)) / grid.cell();
}

Field kernel_series_smalltime(const GridSpec& grid, double t, const ConstCoeffs& coeffs,
                              int terms) {
    check_time(t);
    require(coeffs.dim() == grid.dim, "coefficient dimension differs from grid");
    require(terms >= 0, "terms must be nonnegative");
    MultiIndex origin(grid.dim, 0);
    Field sum = Field::dirac(grid, origin);
    if (terms == 0) return sum;
    if (series_tail_bound(grid, t, coeffs, terms) > 1e-12)
        throw ConvergenceError("series not convergent at requested tolerance");
    Field term = sum;
    for (int i = 1; i < terms; ++i) {
        Field next(grid);
        for (int j = 1; j <= grid.dim; ++j) {
            Field l = laplacian_dir(term, j);
            for (std::size_t k = 0; k < next.size(); ++k) next[k] += coeffs.c[j - 1] * l[k];
        }
        for (std::size_t k = 0; k < next.size(); ++k) {
            next[k] *= t / i;
            sum[k] += next[k];
        }
        term = std::move(next);
    }
    return sum;
}

int recommended_radius(double cbar, double t, double dx) {
    const double r = 2.0 * cbar * t / (dx * dx);
    return std::max(1, static_cast<int>(std::ceil(r + 40.0 * std::sqrt(r + 1.0))));
}

int KernelLine::pos(int k) const {
    if (boundary == Boundary::periodic) {
        const int n = 2 * radius + 1;
        return ((k % n) + n) % n;
    }
    return k + 2 * radius + 1;
}

double KernelLine::second_diff(int k, double dx) const {
    auto at = [&](int m) {
        if (boundary == Boundary::zero && (m < -(2 * radius + 1) || m > 2 * radius + 1)) return 0.0;
        return v[pos(m)];
    };
    return (at(k - 1) - 2.0 * at(k) + at(k + 1)) / (dx * dx);
}

KernelLine kernel_line(double c, double t, double dx, int radius, Boundary b) {
    check_time(t);
    KernelLine L;
    L.radius = radius;
    L.boundary = b;
    const int side = 2 * radius + 1;
    if (b == Boundary::periodic) {
        L.v.assign(side, 0.0);
        if (t == 0.0) {
            L.v[0] = 1.0 / dx;
            return L;
        }
        const double r = 2.0 * c * t / (dx * dx);
        // orders past r + 12 sqrt(r+1) + 20 sit below 1e-30 of the peak
        const long kmax = std::max<long>(radius, static_cast<long>(std::ceil(r + 12.0 * std::sqrt(r + 1.0))) + 20);
        std::vector<double> s = iv_scaled_sequence(kmax, r);
        // fold every order onto its residue, smallest magnitudes first
        for (long k = kmax; k >= 1; --k) {
            if (s[k] == 0.0) continue;
            L.v[L.pos(static_cast<int>(k % side))] += s[k] / dx;
            L.v[L.pos(static_cast<int>(-(k % side)))] += s[k] / dx;
        }
        L.v[0] += s[0] / dx;
        return L;
    }
    const int reach = 2 * radius + 1;
    L.v.assign(2 * reach + 1, 0.0);
    if (t == 0.0) {
        L.v[L.pos(0)] = 1.0 / dx;
        return L;
    }
    std::vector<double> s = iv_scaled_sequence(reach, 2.0 * c * t / (dx * dx));
    for (int k = 0; k <= reach; ++k) L.v[L.pos(k)] = L.v[L.pos(-k)] = s[k] / dx;
    return L;
}

Field kernel_slice(const GridSpec& grid, double t, const ConstCoeffs& coeffs) {
    require(coeffs.dim() == grid.dim, "coefficient dimension differs from grid");
    std::vector<KernelLine> lines;
    for (int j = 0; j < grid.dim; ++j)
        lines.push_back(kernel_line(coeffs.c[j], t, grid.dx, grid.radius, grid.boundary));
    Field out(grid);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double v = 1.0;
        for (int j = 0; j < grid.dim; ++j) v *= lines[j](grid.coord(k, j));
        out[k] = v;
    }
    return out;
}

Field semigroup_apply(const Field& psi, double t, const ConstCoeffs& coeffs) {
    const GridSpec& g = psi.grid();
    require(coeffs.dim() == g.dim, "coefficient dimension differs from grid");
    check_time(t);
    Field cur = psi;
    const int side = g.side();
    std::vector<double> line(side), res(side);
    for (int j = 0; j < g.dim; ++j) {
        KernelLine K = kernel_line(coeffs.c[j], t, g.dx, g.radius, g.boundary);
        const std::size_t st = g.stride(j);
        Field next(g);
        for (std::size_t k = 0; k < cur.size(); ++k) {
            if (g.coord(k, j) != -g.radius) continue;  // start of a line
            for (int i = 0; i < side; ++i) line[i] = cur[k + i * st];
            for (int a = 0; a < side; ++a) {
                double s = 0.0;
                for (int e = 0; e < side; ++e) s += K(a - e) * line[e];
                res[a] = s * g.dx;
            }
            for (int i = 0; i < side; ++i) next[k + i * st] = res[i];
        }
        cur = std::move(next);
    }
    return cur;
}

Field duhamel_const(const Field& psi, const Source& f, double t, const ConstCoeffs& coeffs,
                    int time_nodes) {
    check_time(t);
    Field u = semigroup_apply(psi, t, coeffs);
    if (t == 0.0) return u;
    Rule rule = duhamel_rule(t, time_nodes);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        Field fs = f(rule.x[q]);
        require(fs.grid() == psi.grid(), "source grid differs from initial data grid");
        for (double v : fs.values()) require(std::isfinite(v), "non-finite source value");
        Field a = semigroup_apply(fs, t - rule.x[q], coeffs);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] += rule.w[q] * a[k];
    }
    return u;
}

}  // namespace sdheat
