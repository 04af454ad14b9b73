#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "sdheat/coefficients.hpp"
#include "sdheat/lattice.hpp"
#include "sdheat/quadrature.hpp"

namespace sdheat {

struct TimeQuadrature {
    int nodes = 96;
    TimeRuleKind kind = TimeRuleKind::gauss_legendre_graded;
    double grading = 2.0;

    void validate() const;
    Rule rule(double t) const;  // nodes strictly inside (0,t), symmetric under s -> t-s
};

// a_{alpha-beta,beta}(t): constant-coefficient kernel frozen at c_beta
double frozen_kernel(const MultiIndex& alpha, const MultiIndex& beta, double t,
                     const Coefficients& coeffs);
// K_{alpha,beta}(t) = sum_j (c_alpha^j - c_beta^j) grad+ grad- a_{alpha-beta,beta}(t), t > 0
double k1(const MultiIndex& alpha, const MultiIndex& beta, double t, const Coefficients& coeffs);

// whole matrices Z_{alpha,eta}(t) = a_{alpha-eta,eta}(t) and K(t); t > 0 for K
class KernelMatrices {
public:
    explicit KernelMatrices(const Coefficients& coeffs);
    // either pointer may be null
    void build(double t, Eigen::MatrixXd* Z, Eigen::MatrixXd* K) const;
    const Coefficients& coeffs() const { return c_; }

private:
    Coefficients c_;
    std::vector<std::vector<double>> distinct_;  // per direction
    std::vector<std::vector<int>> which_;        // per direction, site -> distinct index
};

TwoPointField to_two_point(const GridSpec& g, const Eigen::MatrixXd& M);
Eigen::MatrixXd to_matrix(const TwoPointField& F);

// (K^(m) * B)(t) from (K^(m-1) * B)(s) by the graded time rule
Eigen::MatrixXd k_iterate(const KernelMatrices& km,
                          const std::function<Eigen::MatrixXd(double)>& prev, double t,
                          const TimeQuadrature& quad);

// Phi * B on a shared graded mesh over [0, t_max]; B is sites x k
class PhiSeries {
public:
    int m_max = 1;
    double tol = 0;
    double fitted_C = 0, fitted_C3 = 0, tail_estimate = 0;
    double t_max = 0;
    std::vector<double> level_sup;  // sup |K^(m)(t_max) * B| for every measured m >= 1
    TimeQuadrature quad;

    const KernelMatrices& matrices() const { return *km_; }
    const Eigen::MatrixXd& seed() const { return seed_; }
    // (Phi * B)(s) for 0 < s <= t_max
    Eigen::MatrixXd at(double s) const;
    // (K^(m) * B)(s); needs keep_levels
    Eigen::MatrixXd level(int m, double s) const;
    // sum over m >= 2 of (K^(m) * B)(s), interpolated on the mesh
    bool has_higher() const { return !hi_.empty(); }
    Eigen::MatrixXd higher(double s) const { return interp(hi_, s); }

private:
    friend PhiSeries phi(std::shared_ptr<const KernelMatrices>, const Eigen::MatrixXd&, double,
                         const TimeQuadrature&, double, bool);
    Eigen::MatrixXd interp(const std::vector<Eigen::MatrixXd>& v, double s) const;

    std::shared_ptr<const KernelMatrices> km_;
    Eigen::MatrixXd seed_;
    std::vector<double> breaks_, nodes_;
    std::vector<Eigen::MatrixXd> hi_;                  // sum_{m>=2} K^(m)*B at mesh nodes
    std::vector<std::vector<Eigen::MatrixXd>> levels_;  // kept on request, m = 2..m_max
};

PhiSeries phi(std::shared_ptr<const KernelMatrices> km, const Eigen::MatrixXd& seed, double t_max,
              const TimeQuadrature& quad, double tol, bool keep_levels = false);

// (Gamma(t) * B) for t <= t_max of the series
Eigen::MatrixXd gamma_apply(const PhiSeries& series, double t);

struct GammaInfo {
    int m_max = 0;
    double fitted_C = 0, fitted_C3 = 0, tail_estimate = 0;
    int quad_nodes = 0;
};

// column Gamma_{., beta}(t)
Field gamma(const Coefficients& coeffs, const MultiIndex& beta, double t,
            const TimeQuadrature& quad, double tol, GammaInfo* info = nullptr);
TwoPointField gamma_full(const Coefficients& coeffs, double t, const TimeQuadrature& quad,
                         double tol);

// sup |Gamma(t) - Gamma(s) * Gamma(t-s)| dx^d
double propagation_defect(const Coefficients& coeffs, double s, double t,
                          const TimeQuadrature& quad, double tol);

}  // namespace sdheat
