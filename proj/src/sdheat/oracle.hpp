#pragma once

#include <optional>
#include <vector>

#include "sdheat/coefficients.hpp"
#include "sdheat/heat_const.hpp"
#include "sdheat/lattice.hpp"

namespace sdheat {

// v -> sum_j c^j grad+ grad- v - Y v, matrix free
class Generator {
public:
    explicit Generator(const Coefficients& coeffs, std::optional<Field> potential = std::nullopt);

    const GridSpec& grid() const { return c_.grid; }
    const Coefficients& coeffs() const { return c_; }
    void apply(const double* v, double* out) const;
    Field apply(const Field& v) const;
    // bound on the l-infinity operator norm (row sums of |L|)
    double norm_bound() const { return norm_; }

private:
    Coefficients c_;
    std::vector<double> y_;
    std::vector<long> nb_;  // [site][j][0 = minus, 1 = plus], -1 outside
    double norm_ = 0;
};

struct ExpmStats {
    long steps = 0;
    int degree = 0;
    long matvecs = 0;
};

// e^{tL} v (+ int_0^t e^{sL} f ds for a time-constant source f) with
// |error|_inf <= tol (|v|_inf + t |f|_inf)
Field expm_apply(const Generator& gen, double t, const Field& v, double tol,
                 const Field* source = nullptr, ExpmStats* stats = nullptr);

// oracle column Gamma_{., beta}(t); sup-norm error <= tol
Field gamma_oracle(const Coefficients& coeffs, const MultiIndex& beta, double t, double tol);

// sup over interior slices of |(u_{k+1} - u_{k-1})/2h - L u_k - f(t_k)|
double residual(const std::vector<Field>& u, const Generator& gen, const Source& f,
                const std::vector<double>& times);

}  // namespace sdheat
