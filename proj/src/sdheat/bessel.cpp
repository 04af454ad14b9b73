#include "sdheat/bessel.hpp"

#include <cmath>
#include <numbers>

#include "sdheat/errors.hpp"

namespace sdheat {

namespace {

constexpr double series_limit = 30.0;
constexpr double rescale = 1e200;

void check(long n, double r) {
    require(std::isfinite(r), "Bessel argument must be finite");
    require(r >= 0.0, "Bessel argument must be nonnegative");
    require(std::labs(n) <= 1000000, "Bessel order out of range");
}

// e^{-r}(r/2)^n/n! * sum_k (r^2/4)^k n!/(k!(n+k)!)
double series(long n, double r) {
    const double log_t0 = n * std::log(0.5 * r) - std::lgamma(n + 1.0) - r;
    const double q = 0.25 * r * r;
    double term = 1.0, sum = 1.0;
    for (long k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::exp(log_t0 + std::log(sum));
}

// backward recurrence I_{k-1} = I_{k+1} + (2k/r) I_k, normalised by
// I_0 + 2 sum_k I_k = e^r. Values at orders 0..nmax go into out (scaled).
void miller(long nmax, double r, std::vector<double>& out) {
    const long top = miller_start(nmax, r);
    out.assign(nmax + 1, 0.0);
    std::vector<int> scale_at(nmax + 1, 0);
    int scale = 0;
    double y_up = 0.0, y = 1e-30, sum = 0.0;
    for (long k = top; k >= 1; --k) {
        if (k <= nmax) {
            out[k] = y;
            scale_at[k] = scale;
        }
        sum += 2.0 * y;
        double y_down = y_up + (2.0 * k / r) * y;
        y_up = y;
        y = y_down;
        if (y > rescale) {
            y /= rescale;
            y_up /= rescale;
            sum /= rescale;
            ++scale;
        }
    }
    out[0] = y;
    scale_at[0] = scale;
    sum += y;
    // divide first, then undo the rescalings; values only shrink, so nothing
    // overflows and only genuinely negligible orders underflow
    const double inv = 1.0 / sum;
    for (long k = 0; k <= nmax; ++k) {
        double v = out[k] * inv;
        for (int s = scale_at[k]; s < scale && v != 0.0; ++s) v /= rescale;
        out[k] = v;
    }
}

}  // namespace

long miller_start(long n, double r) {
    n = std::labs(n);
    long a = n + static_cast<long>(std::ceil(10.0 + 2.0 * std::sqrt(r * n + 400.0)));
    long b = static_cast<long>(std::ceil(10.0 * std::sqrt(r) + 40.0));
    return a > b ? a : b;
}

double iv_scaled(long n, double r) {
    check(n, r);
    n = std::labs(n);
    if (r == 0.0) return n == 0 ? 1.0 : 0.0;
    if (r < series_limit) return series(n, r);
    std::vector<double> v;
    miller(n, r, v);
    return v[n];
}

std::vector<double> iv_scaled_sequence(long nmax, double r) {
    check(nmax, r);
    require(nmax >= 0, "sequence length must be nonnegative");
    std::vector<double> v(nmax + 1, 0.0);
    if (r == 0.0) {
        v[0] = 1.0;
        return v;
    }
    // the recurrence is cheaper for whole sequences; only tiny r would overflow it
    if (r < 1e-2) {
        for (long k = 0; k <= nmax; ++k) {
            v[k] = series(k, r);
            if (v[k] == 0.0) break;
        }
        return v;
    }
    miller(nmax, r, v);
    return v;
}

double iv_scaled_quadrature(long n, double r) {
    check(n, r);
    n = std::labs(n);
    if (r == 0.0) return n == 0 ? 1.0 : 0.0;
    const double nd = static_cast<double>(n);
    const double beta = std::asinh(nd / r);
    const double rc = std::hypot(r, nd);  // r cosh(beta)
    // exponent at the saddle, factored out of the integrand
    const double e0 = (rc - r) - nd * beta;
    auto g = [&](double th) {
        const double h = std::sin(0.5 * th);
        return std::exp(-2.0 * rc * h * h) * std::cos(nd * (std::sin(th) - th));
    };
    // mean over [-pi, pi) of g; g is even so fold onto [0, pi]
    auto trap = [&](long m) {
        double s = 0.5 * (g(0.0) + g(std::numbers::pi));
        for (long k = 1; k < m; ++k) s += g(std::numbers::pi * k / m);
        return s / m;
    };
    long m = 32;
    double prev = trap(m);
    for (int it = 0; it < 20; ++it) {
        m *= 2;
        double cur = trap(m);
        if (std::abs(cur - prev) <= 1e-14 * std::abs(cur)) return std::exp(e0) * cur;
        prev = cur;
    }
    throw ConvergenceError("Bessel quadrature did not converge");
}

}  // namespace sdheat
