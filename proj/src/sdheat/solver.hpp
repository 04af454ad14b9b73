#pragma once

#include <optional>
#include <vector>

#include "sdheat/coefficients.hpp"
#include "sdheat/heat_const.hpp"
#include "sdheat/parametrix.hpp"

namespace sdheat {

struct CauchyProblem {
    Coefficients coeffs;
    Field psi;
    Source source;                  // may be empty (f = 0)
    std::optional<Field> potential;  // Y >= 0
    double horizon = 1.0;

    void validate() const;
};

struct SolveReport {
    int panels = 0;
    int picard_iters = 0;
    int halvings = 0;
    double fixed_point_residual = 0;
    int m_max = 0;
    int seed_columns = 0;
};

// u(t) = Gamma(t)*psi + int_0^t Gamma(tau)*f(t-tau) dtau at each requested time
std::vector<Field> solve_inhomogeneous(const CauchyProblem& prob, const std::vector<double>& times,
                                       const TimeQuadrature& quad, double tol,
                                       SolveReport* report = nullptr);
Field solve_inhomogeneous(const CauchyProblem& prob, double t, const TimeQuadrature& quad,
                          double tol, SolveReport* report = nullptr);

// du/dt = Lu - Yu + f by Picard iteration of the Duhamel formula on equal
// panels; returns u at t k/slices, k = 1..slices
std::vector<Field> solve_with_potential(const CauchyProblem& prob, double t, int slices,
                                        const TimeQuadrature& quad, double tol, int max_picard = 50,
                                        SolveReport* report = nullptr);
Field solve_with_potential(const CauchyProblem& prob, double t, const TimeQuadrature& quad,
                           double tol, int max_picard = 50, SolveReport* report = nullptr);

// max over j and sites of |grad+^j u|
double gradient_sup(const Field& u);

}  // namespace sdheat
