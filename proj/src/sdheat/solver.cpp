#include "sdheat/solver.hpp"

#include <algorithm>
#include <cmath>

#include "sdheat/parallel.hpp"
#include "sdheat/quadrature.hpp"

namespace sdheat {

namespace {

constexpr int duhamel_nodes = 32;
constexpr int grading_levels = 8;

void check_field(const Field& f, const GridSpec& g, const char* what) {
    require(f.grid() == g, std::string(what) + " lives on a different grid");
    for (double v : f.values()) require(std::isfinite(v), std::string(what) + " must be finite");
}

Field source_at(const CauchyProblem& p, double s) {
    if (!p.source) return Field(p.coeffs.grid);
    Field f = p.source(s);
    check_field(f, p.coeffs.grid, "source");
    return f;
}

Eigen::Map<const Eigen::VectorXd> vec(const Field& f) {
    return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}

Field to_field(const GridSpec& g, const Eigen::VectorXd& v) {
    return Field(g, std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

void CauchyProblem::validate() const {
    require(horizon > 0 && std::isfinite(horizon), "horizon must be positive");
    check_field(psi, coeffs.grid, "initial data");
    if (potential) {
        check_field(*potential, coeffs.grid, "potential");
        for (double y : potential->values()) require(y >= 0, "potential must be >= 0");
    }
}

std::vector<Field> solve_inhomogeneous(const CauchyProblem& prob, const std::vector<double>& times,
                                       const TimeQuadrature& quad, double tol, SolveReport* report) {
    prob.validate();
    quad.validate();
    require(!prob.potential, "use solve_with_potential for problems with a potential");
    require(!times.empty(), "no output times");
    const GridSpec& g = prob.coeffs.grid;
    const double dxd = g.cell();
    const auto n = static_cast<Eigen::Index>(g.sites());
    double t_max = 0.0;
    for (double t : times) {
        require(t >= 0 && t <= prob.horizon * (1 + 1e-12), "output time outside [0, horizon]");
        t_max = std::max(t_max, t);
    }
    if (report) *report = SolveReport{1, 0, 0, 0, 0, 0};
    if (t_max == 0.0) return std::vector<Field>(times.size(), prob.psi);

    // data columns: psi, then distinct source slices
    std::vector<Field> cols{prob.psi};
    std::vector<Rule> rules(times.size());
    std::vector<std::vector<int>> which(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (times[j] == 0.0 || !prob.source) continue;
        rules[j] = duhamel_rule(times[j], duhamel_nodes);
        for (double s : rules[j].x) {
            Field f = source_at(prob, s);
            int idx = -1;
            for (std::size_t c = 1; c < cols.size() && idx < 0; ++c)
                if (cols[c].values() == f.values()) idx = static_cast<int>(c);
            if (idx < 0) {
                idx = static_cast<int>(cols.size());
                cols.push_back(std::move(f));
            }
            which[j].push_back(idx);
        }
    }
    const bool full = static_cast<Eigen::Index>(cols.size()) > n;
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) X.col(static_cast<Eigen::Index>(c)) = vec(cols[c]);
    const Eigen::MatrixXd B = full ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n) / dxd) : X;

    auto km = std::make_shared<const KernelMatrices>(prob.coeffs);
    PhiSeries S = phi(km, B, t_max, quad, tol);
    // Gamma(tau) * (column c)
    auto apply = [&](double tau, int c) -> Eigen::VectorXd {
        Eigen::MatrixXd G = gamma_apply(S, tau);
        if (full) return dxd * (G * X.col(c));
        return G.col(c);
    };

    std::vector<Field> out;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        if (t == 0.0) {
            out.push_back(prob.psi);
            continue;
        }
        Eigen::VectorXd u = apply(t, 0);
        const Rule& r = rules[j];
        for (std::size_t q = 0; q < which[j].size(); ++q) u += r.w[q] * apply(t - r.x[q], which[j][q]);
        out.push_back(to_field(g, u));
    }
    if (report) {
        report->m_max = S.m_max;
        report->seed_columns = static_cast<int>(B.cols());
    }
    return out;
}

Field solve_inhomogeneous(const CauchyProblem& prob, double t, const TimeQuadrature& quad,
                          double tol, SolveReport* report) {
    return solve_inhomogeneous(prob, std::vector<double>{t}, quad, tol, report).front();
}

namespace {

// collocation on one panel [0,h]: nodes r_0 = 0 and 8 Gauss nodes; targets
// are the Gauss nodes and h
struct PanelOperator {
    std::vector<double> r;         // 9 collocation nodes
    std::vector<double> tau;       // 9 targets
    std::vector<Eigen::MatrixXd> G;  // Gamma(tau_i) dx^d
    std::vector<Eigen::MatrixXd> W;  // [i*9+k] int_0^{tau_i} l_k(s) Gamma(tau_i - s) ds dx^d
    int m_max = 0;
};

PanelOperator panel_operator(const Coefficients& c, double h, const TimeQuadrature& quad, double tol) {
    PanelOperator P;
    const Rule gl = composite_gauss({0.0, h});
    P.r.push_back(0.0);
    for (double x : gl.x) P.r.push_back(x);
    P.tau.assign(P.r.begin() + 1, P.r.end());
    P.tau.push_back(h);
    const int nc = static_cast<int>(P.r.size());

    const GridSpec& g = c.grid;
    const double dxd = g.cell();
    const auto n = static_cast<Eigen::Index>(g.sites());
    auto km = std::make_shared<const KernelMatrices>(c);
    PhiSeries S = phi(km, Eigen::MatrixXd::Identity(n, n) / dxd, h, quad, tol);
    P.m_max = S.m_max;

    // one sigma rule shared by all targets: Gauss panels between consecutive
    // targets, the first interval graded geometrically toward sigma = 0
    std::vector<double> br{0.0};
    for (int k = grading_levels; k >= 0; --k) br.push_back(P.tau[0] * std::ldexp(1.0, -k));
    for (std::size_t i = 1; i < P.tau.size(); ++i) br.push_back(P.tau[i]);
    const Rule rs = composite_gauss(br);
    std::vector<Eigen::MatrixXd> Gs(rs.size());
    parallel_for(rs.size(), [&](std::size_t q) { Gs[q] = gamma_apply(S, rs.x[q]); });

    P.G.resize(P.tau.size());
    P.W.assign(P.tau.size() * nc, Eigen::MatrixXd::Zero(n, n));
    std::vector<double> l(nc);
    for (std::size_t i = 0; i < P.tau.size(); ++i) {
        P.G[i] = dxd * gamma_apply(S, P.tau[i]);
        for (std::size_t q = 0; q < rs.size() && rs.x[q] < P.tau[i]; ++q) {
            lagrange_weights(P.r.data(), nc, P.tau[i] - rs.x[q], l.data());
            for (int k = 0; k < nc; ++k) P.W[i * nc + k] += (rs.w[q] * l[k] * dxd) * Gs[q];
        }
    }
    return P;
}

}  // namespace

std::vector<Field> solve_with_potential(const CauchyProblem& prob, double t, int slices,
                                        const TimeQuadrature& quad, double tol, int max_picard,
                                        SolveReport* report) {
    prob.validate();
    quad.validate();
    require(t > 0 && t <= prob.horizon * (1 + 1e-12), "time outside (0, horizon]");
    require(slices >= 1, "need at least one slice");
    require(max_picard >= 8, "max_picard must be >= 8");
    require(tol > 0 && std::isfinite(tol), "tolerance must be positive");
    const GridSpec& g = prob.coeffs.grid;
    const auto n = static_cast<Eigen::Index>(g.sites());
    Eigen::VectorXd Y = Eigen::VectorXd::Zero(n);
    if (prob.potential) Y = vec(*prob.potential);
    const double ynorm = Y.size() ? Y.maxCoeff() : 0.0;

    int per_slice = std::max(1, static_cast<int>(std::ceil(2.0 * t * ynorm / slices)));
    SolveReport rep;
    for (int halving = 0; halving <= 6; ++halving, per_slice *= 2) {
        const int panels = per_slice * slices;
        const double h = t / panels;
        const PanelOperator P = panel_operator(prob.coeffs, h, quad, tol);
        const int nc = static_cast<int>(P.r.size()), nt = static_cast<int>(P.tau.size());
        rep = SolveReport{panels, 0, halving, 0, P.m_max, static_cast<int>(n)};

        std::vector<Field> out;
        Eigen::VectorXd u0 = vec(prob.psi);
        bool failed = false;
        for (int p = 0; p < panels && !failed; ++p) {
            const double t0 = p * h;
            std::vector<Eigen::VectorXd> f(nc);
            for (int k = 0; k < nc; ++k) f[k] = vec(source_at(prob, t0 + P.r[k]));
            std::vector<Eigen::VectorXd> base(nt);
            for (int i = 0; i < nt; ++i) base[i] = P.G[i] * u0;
            // iterate on u at the collocation nodes 1..8 and the end
            std::vector<Eigen::VectorXd> u(nt, u0);
            double prev = INFINITY, diff = INFINITY;
            int it = 0;
            while (diff > tol) {
                if (++it > max_picard) {
                    failed = true;
                    break;
                }
                std::vector<Eigen::VectorXd> gk(nc);
                gk[0] = f[0] - Y.cwiseProduct(u0);
                for (int k = 1; k < nc; ++k) gk[k] = f[k] - Y.cwiseProduct(u[k - 1]);
                diff = 0.0;
                for (int i = 0; i < nt; ++i) {
                    Eigen::VectorXd v = base[i];
                    for (int k = 0; k < nc; ++k) v.noalias() += P.W[i * nc + k] * gk[k];
                    diff = std::max(diff, (v - u[i]).cwiseAbs().maxCoeff());
                    u[i] = std::move(v);
                }
                if (it > 2 && diff > 0.9 * prev) {
                    failed = true;
                    break;
                }
                prev = diff;
            }
            rep.picard_iters += it;
            rep.fixed_point_residual = std::max(rep.fixed_point_residual, diff);
            u0 = u[nt - 1];
            if ((p + 1) % per_slice == 0) out.push_back(to_field(g, u0));
        }
        if (!failed) {
            if (report) *report = rep;
            return out;
        }
    }
    throw ConvergenceError("Picard iteration did not contract after 6 panel halvings");
}

Field solve_with_potential(const CauchyProblem& prob, double t, const TimeQuadrature& quad,
                           double tol, int max_picard, SolveReport* report) {
    return solve_with_potential(prob, t, 1, quad, tol, max_picard, report).back();
}

double gradient_sup(const Field& u) {
    double m = 0.0;
    for (int j = 1; j <= u.grid().dim; ++j) {
        const Field d = forward_diff(u, j);
        for (double v : d.values()) m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace sdheat
