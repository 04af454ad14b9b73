#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "sdheat/lattice.hpp"

namespace sdheat {

struct ConstCoeffs {
    std::vector<double> c;  // c^1..c^d

    ConstCoeffs() = default;
    explicit ConstCoeffs(std::vector<double> values);
    static ConstCoeffs isotropic(int dim, double value);
    double cbar() const;
    int dim() const { return static_cast<int>(c.size()); }
};

// Dx^{-1} e^{-r} I_n(r), r = 2ct/Dx^2
double kernel_1d(long n, double t, double c, double dx);
double kernel_nd(const MultiIndex& alpha, double t, const ConstCoeffs& coeffs, double dx);

// Fourier-side representation, trapezoid rule per direction
std::complex<double> kernel_spectral_complex(const MultiIndex& alpha, double t,
                                             const ConstCoeffs& coeffs, double dx, int nodes);
double kernel_spectral(const MultiIndex& alpha, double t, const ConstCoeffs& coeffs, double dx,
                       int nodes);

// truncated sum_i t^i/i! L^i delta on the grid
Field kernel_series_smalltime(const GridSpec& grid, double t, const ConstCoeffs& coeffs,
                              int terms);
// tail bound used as the precondition of the series
double series_tail_bound(const GridSpec& grid, double t, const ConstCoeffs& coeffs, int terms);

// radius making the neglected Bessel tail negligible: N >= r + 40 sqrt(r+1)
int recommended_radius(double cbar, double t, double dx);

// 1-D kernel on the offsets a grid line can see. Periodic: folded onto the
// side (index k mod side). Zero extension: offsets -(2N+1)..2N+1 at k+2N+1.
struct KernelLine {
    int radius = 0;
    Boundary boundary = Boundary::periodic;
    std::vector<double> v;

    int pos(int k) const;
    double operator()(int k) const { return v[pos(k)]; }
    // (a_{k-1} - 2a_k + a_{k+1})/dx^2
    double second_diff(int k, double dx) const;
};

KernelLine kernel_line(double c, double t, double dx, int radius, Boundary b);

// kernel slice on the grid (periodised on periodic grids)
Field kernel_slice(const GridSpec& grid, double t, const ConstCoeffs& coeffs);

Field semigroup_apply(const Field& psi, double t, const ConstCoeffs& coeffs);

using Source = std::function<Field(double)>;

Field duhamel_const(const Field& psi, const Source& f, double t, const ConstCoeffs& coeffs,
                    int time_nodes);

}  // namespace sdheat
