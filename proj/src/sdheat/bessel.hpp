#pragma once

#include <vector>

namespace sdheat {

// e^{-r} I_n(r); negative orders fold onto |n|
double iv_scaled(long n, double r);

// independent evaluation from the integral representation, on the
// steepest-descent contour (shift by i*asinh(n/r)) so tiny values keep
// their relative accuracy; periodic trapezoid with node doubling
double iv_scaled_quadrature(long n, double r);

// e^{-r} I_k(r) for k = 0..nmax
std::vector<double> iv_scaled_sequence(long nmax, double r);

// starting order of the backward recurrence for order n
long miller_start(long n, double r);

}  // namespace sdheat
