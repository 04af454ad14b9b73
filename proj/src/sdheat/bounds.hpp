#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdheat/heat_const.hpp"
#include "sdheat/lattice.hpp"

namespace sdheat {

struct LorentzBoundParams {
    double cbar = 1.0;
    double dx = 1.0;
    int dim = 1;
    int m = 0;
    bool cubic_tail = true;
};

// (1/sqrt(2cbar) ^ sqrt(t)/dx)^{Z} t^{-(d+m)/2} prod_j (1 + z^2 + [z^3])^{-1},
// z = |x^j|/sqrt(2 cbar t)
double lorentz_rhs(const MultiIndex& alpha, double t, const LorentzBoundParams& p);

// kernel K estimate at the offset alpha - beta (first-order, no cubic term)
double k_rhs(const MultiIndex& alpha, const MultiIndex& beta, double t, const LorentzBoundParams& p);

constexpr double gaussian_C0 = 252.0;

struct GaussianValue {
    double rhs = 0;
    double log_rhs = 0;
    bool in_region = false;
};

GaussianValue gaussian_rhs(const MultiIndex& alpha, double t, const ConstCoeffs& c, double dx);
double gaussian_rhs_b(const MultiIndex& alpha, double t, const ConstCoeffs& c, double dx,
                      const std::vector<double>& b);
double log_gaussian_rhs_b(const MultiIndex& alpha, double t, const ConstCoeffs& c, double dx,
                          const std::vector<double>& b);

double pang_F(double gamma);
double log_pang_rhs(long n, double t);
double pang_rhs(long n, double t);

// L~(tau, z) = tau^{-1/2} (1 + z^2/tau)^{-1}
double lorentz_tilde(double tau, double z);
double lorentz_closed_form(double x, double y, double s, double t);
// adaptive Gauss-Kronrod evaluation of the defining z-integral
double lorentz_quadrature(double x, double y, double s, double t);

// f(t, alpha) = (1 ^ C1 t/dx^2)^{Z/2} t^{-1/2} prod_j L~(C1 t, alpha^j dx)
double prop53_f(double t, const MultiIndex& alpha, double C1, double dx);

struct BoundSample {
    MultiIndex alpha;
    double t = 0;
    double dx = 0;
    double quantity = 0;
    double rhs = 0;
};

struct BoundReport {
    std::string bound_id;
    double sup_ratio = 0;
    MultiIndex argmax_alpha;
    double argmax_t = 0;
    std::size_t samples = 0;
    double fitted_constant = 0;
    std::vector<std::pair<double, double>> per_dx;  // (dx, constant), dx descending
    double t_min = 0, t_max = 0;

    // (max - min)/min over per_dx constants
    double spread() const;
};

// Streaming form of fit_bound; the maximum is order independent.
class BoundFitter {
public:
    explicit BoundFitter(std::string id) : id_(std::move(id)) {}
    void add(const MultiIndex& alpha, double t, double dx, double quantity, double rhs);
    BoundReport report() const;

private:
    std::string id_;
    BoundReport r_;
    std::vector<std::pair<double, double>> per_dx_;
    bool any_ = false;
};

BoundReport fit_bound(const std::string& id, const std::vector<BoundSample>& samples);

std::string to_json(const BoundReport& r);

}  // namespace sdheat
