#include "sdheat/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "sdheat/heat_const.hpp"
#include "sdheat/parallel.hpp"

namespace sdheat {

void TimeQuadrature::validate() const {
    require(nodes >= 4 && nodes % 2 == 0, "quadrature nodes must be even and >= 4");
    if (kind == TimeRuleKind::gauss_legendre_graded)
        require(nodes % 16 == 0, "graded Gauss-Legendre needs a multiple of 16 nodes");
    require(grading >= 1.0, "grading exponent must be >= 1");
}

Rule TimeQuadrature::rule(double t) const { return graded_two_sided(t, nodes, kind, grading); }

namespace {

double line_value(const Coefficients& co, int j, std::size_t site, int offset, double t, bool second) {
    const GridSpec& g = co.grid;
    KernelLine L = kernel_line(co(site, j), t, g.dx, g.radius, g.boundary);
    return second ? L.second_diff(offset, g.dx) : L(offset);
}

void check_pair(const Coefficients& co, const MultiIndex& a, const MultiIndex& b) {
    require(static_cast<int>(a.size()) == co.grid.dim && static_cast<int>(b.size()) == co.grid.dim,
            "index dimension differs from grid");
    require(co.grid.inside(a) && co.grid.inside(b), "index outside the grid");
}

}  // namespace

double frozen_kernel(const MultiIndex& alpha, const MultiIndex& beta, double t,
                     const Coefficients& coeffs) {
    check_pair(coeffs, alpha, beta);
    require(t >= 0 && std::isfinite(t), "time must be finite and >= 0");
    const std::size_t b = coeffs.grid.flat(beta);
    double v = 1.0;
    for (int j = 0; j < coeffs.grid.dim; ++j)
        v *= line_value(coeffs, j, b, alpha[j] - beta[j], t, false);
    return v;
}

double k1(const MultiIndex& alpha, const MultiIndex& beta, double t, const Coefficients& coeffs) {
    check_pair(coeffs, alpha, beta);
    require(t > 0 && std::isfinite(t), "K needs t > 0");
    const GridSpec& g = coeffs.grid;
    const std::size_t a = g.flat(alpha), b = g.flat(beta);
    double sum = 0.0;
    for (int j = 0; j < g.dim; ++j) {
        const double dc = coeffs(a, j) - coeffs(b, j);
        if (dc == 0.0) continue;
        double v = dc * line_value(coeffs, j, b, alpha[j] - beta[j], t, true);
        for (int i = 0; i < g.dim; ++i)
            if (i != j) v *= line_value(coeffs, i, b, alpha[i] - beta[i], t, false);
        sum += v;
    }
    return sum;
}

KernelMatrices::KernelMatrices(const Coefficients& coeffs) : c_(coeffs) {
    const GridSpec& g = c_.grid;
    distinct_.resize(g.dim);
    which_.resize(g.dim);
    for (int j = 0; j < g.dim; ++j) {
        std::map<double, int> idx;
        for (std::size_t k = 0; k < g.sites(); ++k) idx.emplace(c_(k, j), 0);
        for (auto& [v, i] : idx) {
            i = static_cast<int>(distinct_[j].size());
            distinct_[j].push_back(v);
        }
        which_[j].resize(g.sites());
        for (std::size_t k = 0; k < g.sites(); ++k) which_[j][k] = idx[c_(k, j)];
    }
}

void KernelMatrices::build(double t, Eigen::MatrixXd* Z, Eigen::MatrixXd* K) const {
    require(t >= 0 && std::isfinite(t), "time must be finite and >= 0");
    require(K == nullptr || t > 0, "K needs t > 0");
    const GridSpec& g = c_.grid;
    const int d = g.dim, N = g.radius, span = 4 * N + 1;
    const auto n = static_cast<Eigen::Index>(g.sites());

    // per direction and distinct value: kernel and second difference on offsets -2N..2N
    std::vector<std::vector<double>> A(d), D(d);
    for (int j = 0; j < d; ++j) {
        const std::size_t m = distinct_[j].size();
        A[j].assign(m * span, 0.0);
        D[j].assign(m * span, 0.0);
        const double h2 = g.dx * g.dx;
        parallel_for(m, [&](std::size_t i) {
            KernelLine L = kernel_line(distinct_[j][i], t, g.dx, N, g.boundary);
            std::vector<double> ext(span + 2);  // offsets -2N-1 .. 2N+1
            for (int o = -2 * N - 1; o <= 2 * N + 1; ++o) ext[o + 2 * N + 1] = L(o);
            double* a = &A[j][i * span];
            double* dd = &D[j][i * span];
            for (int q = 0; q < span; ++q) {
                a[q] = ext[q + 1];
                if (K) dd[q] = (ext[q] - 2.0 * ext[q + 1] + ext[q + 2]) / h2;
            }
        });
    }
    if (Z) Z->resize(n, n);
    if (K) K->resize(n, n);
    std::vector<int> coord(static_cast<std::size_t>(n) * d);
    for (Eigen::Index k = 0; k < n; ++k)
        for (int j = 0; j < d; ++j) coord[k * d + j] = g.coord(static_cast<std::size_t>(k), j);

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t e) {
        std::vector<const double*> a(d), dd(d);
        for (int j = 0; j < d; ++j) {
            a[j] = &A[j][which_[j][e] * span + 2 * N];
            dd[j] = &D[j][which_[j][e] * span + 2 * N];
        }
        const auto ec = static_cast<Eigen::Index>(e);
        if (d == 1) {
            const double ce = c_(e, 0);
            for (Eigen::Index al = 0; al < n; ++al) {
                const int o = coord[al] - coord[e];
                if (Z) (*Z)(al, ec) = a[0][o];
                if (K) (*K)(al, ec) = (c_(al, 0) - ce) * dd[0][o];
            }
            return;
        }
        std::vector<int> o(d);
        for (Eigen::Index al = 0; al < n; ++al) {
            double prod = 1.0;
            for (int j = 0; j < d; ++j) {
                o[j] = coord[al * d + j] - coord[e * d + j];
                prod *= a[j][o[j]];
            }
            if (Z) (*Z)(al, ec) = prod;
            if (!K) continue;
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                const double dc = c_(al, j) - c_(e, j);
                if (dc == 0.0) continue;
                double v = dc * dd[j][o[j]];
                for (int i = 0; i < d; ++i)
                    if (i != j) v *= a[i][o[i]];
                s += v;
            }
            (*K)(al, ec) = s;
        }
    });
}

TwoPointField to_two_point(const GridSpec& g, const Eigen::MatrixXd& M) {
    const std::size_t n = g.sites();
    require(static_cast<std::size_t>(M.rows()) == n && static_cast<std::size_t>(M.cols()) == n,
            "matrix size differs from grid");
    std::vector<double> v(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) v[a * n + b] = M(a, b);
    return TwoPointField(g, std::move(v));
}

Eigen::MatrixXd to_matrix(const TwoPointField& F) {
    const auto n = static_cast<Eigen::Index>(F.n());
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) M(a, b) = F(a, b);
    return M;
}

Eigen::MatrixXd k_iterate(const KernelMatrices& km,
                          const std::function<Eigen::MatrixXd(double)>& prev, double t,
                          const TimeQuadrature& quad) {
    quad.validate();
    require(t > 0, "time must be positive");
    const double dxd = km.coeffs().grid.cell();
    const Rule r = quad.rule(t);
    Eigen::MatrixXd acc;
    Eigen::MatrixXd K;
    for (std::size_t q = 0; q < r.size(); ++q) {
        km.build(t - r.x[q], nullptr, &K);
        Eigen::MatrixXd p = prev(r.x[q]);
        require(p.rows() == K.cols(), "previous iterate has the wrong size");
        if (acc.size() == 0) acc = Eigen::MatrixXd::Zero(K.rows(), p.cols());
        acc.noalias() += (r.w[q] * dxd) * K * p;
    }
    return acc;
}

namespace {

double sup_abs(const Eigen::MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// analytic tail sum_{m>M} C C3^m T^{(m-1)/2} / Gamma(m/2)
double fitted_tail(double C, double C3, double T, int M) {
    double sum = 0.0;
    for (int m = M + 1; m < M + 4000; ++m) {
        const double lt = std::log(C) + m * std::log(C3) + 0.5 * (m - 1) * std::log(T) -
                          std::lgamma(0.5 * m);
        const double term = std::exp(lt);
        sum += term;
        if (m > M + 5 && term <= 1e-18 * sum) break;
    }
    return sum;
}

constexpr int m_cap = 20;

struct TailFit {
    double C = 0, C3 = 0, tail = 0;
};

// C C3^m T^{(m-1)/2} / Gamma(m/2) through the measured sup norms at levels
// M-2 and M (M-1 and M when M = 2), which steps over the odd/even wobble
TailFit fit_tail(const std::vector<double>& sup, int M, double T) {
    TailFit f;
    const double nM = sup[M - 1];
    if (nM == 0.0) return f;
    if (M == 1) {
        const double r = sup[1] / sup[0];  // n2/n1 = C3 sqrt(pi T)
        f.C3 = r / std::sqrt(std::numbers::pi * T);
    } else if (M == 2) {
        f.C3 = (sup[1] / sup[0]) / std::sqrt(std::numbers::pi * T);
    } else {
        const double r = nM / sup[M - 3];  // = C3^2 T Gamma((M-2)/2)/Gamma(M/2)
        f.C3 = std::sqrt(r * std::exp(std::lgamma(0.5 * M) - std::lgamma(0.5 * (M - 2))) / T);
    }
    if (f.C3 == 0.0) return f;
    f.C = std::exp(std::log(nM) + std::lgamma(0.5 * M) - M * std::log(f.C3) -
                   0.5 * (M - 1) * std::log(T));
    f.tail = fitted_tail(f.C, f.C3, T, M);
    return f;
}

}  // namespace

Eigen::MatrixXd PhiSeries::interp(const std::vector<Eigen::MatrixXd>& v, double s) const {
    const int P = static_cast<int>(breaks_.size()) - 1;
    int p = static_cast<int>(std::upper_bound(breaks_.begin(), breaks_.end(), s) - breaks_.begin()) - 1;
    p = std::clamp(p, 0, P - 1);
    double w[8];
    lagrange_weights(&nodes_[8 * p], 8, s, w);
    Eigen::MatrixXd out = w[0] * v[8 * p];
    for (int i = 1; i < 8; ++i) out += w[i] * v[8 * p + i];
    return out;
}

Eigen::MatrixXd PhiSeries::at(double s) const {
    require(s > 0 && s <= t_max * (1 + 1e-12), "time outside the series range");
    Eigen::MatrixXd K;
    km_->build(s, nullptr, &K);
    Eigen::MatrixXd out = km_->coeffs().grid.cell() * (K * seed_);
    if (!hi_.empty()) out += interp(hi_, s);
    return out;
}

Eigen::MatrixXd PhiSeries::level(int m, double s) const {
    require(m >= 1 && m <= m_max, "level outside 1..m_max");
    require(s > 0 && s <= t_max * (1 + 1e-12), "time outside the series range");
    if (m == 1) {
        Eigen::MatrixXd K;
        km_->build(s, nullptr, &K);
        return km_->coeffs().grid.cell() * (K * seed_);
    }
    require(!levels_.empty(), "levels were not kept");
    return interp(levels_[m - 2], s);
}

PhiSeries phi(std::shared_ptr<const KernelMatrices> km, const Eigen::MatrixXd& seed, double t_max,
              const TimeQuadrature& quad, double tol, bool keep_levels) {
    quad.validate();
    require(tol > 0 && std::isfinite(tol), "tolerance must be positive");
    require(t_max > 0 && std::isfinite(t_max), "time must be positive");
    const GridSpec& g = km->coeffs().grid;
    require(static_cast<std::size_t>(seed.rows()) == g.sites() && seed.cols() >= 1,
            "seed block has the wrong number of rows");
    const double dxd = g.cell();
    const int Q = quad.nodes;

    PhiSeries S;
    S.km_ = km;
    S.seed_ = seed;
    S.tol = tol;
    S.t_max = t_max;
    S.quad = quad;

    // K^(1), K^(2) at t_max for the truncation fit
    const Rule RT = quad.rule(t_max);
    std::vector<Eigen::MatrixXd> KT(Q);
    parallel_for(Q, [&](std::size_t q) { km->build(t_max - RT.x[q], nullptr, &KT[q]); });
    Eigen::MatrixXd K0;
    km->build(t_max, nullptr, &K0);
    const double n1 = dxd * sup_abs(K0 * seed);
    Eigen::MatrixXd L2 = Eigen::MatrixXd::Zero(seed.rows(), seed.cols());
    for (int q = 0; q < Q; ++q) L2.noalias() += (RT.w[q] * dxd * dxd) * KT[q] * (KT[Q - 1 - q] * seed);
    const double n2 = sup_abs(L2);
    if (n1 == 0.0 || n2 == 0.0) {
        S.level_sup = {n1};
        S.m_max = 1;
        return S;
    }
    // shared mesh: P panels with breaks t_max (k/P)^2, 8 Gauss nodes each
    const int P = std::max(1, Q / 8);
    S.breaks_.resize(P + 1);
    for (int k = 0; k <= P; ++k) S.breaks_[k] = t_max * std::pow(static_cast<double>(k) / P, 2);
    S.breaks_[P] = t_max;
    S.nodes_ = composite_gauss(S.breaks_).x;
    const int G = static_cast<int>(S.nodes_.size());

    const int M = m_cap;
    std::vector<std::vector<Eigen::MatrixXd>> lev(M - 1, std::vector<Eigen::MatrixXd>(G));
    std::vector<Rule> rules(G);
    for (int k = 0; k < G; ++k) rules[k] = quad.rule(S.nodes_[k]);

    // panel of every rule node; nodes in earlier panels see finished levels
    std::vector<int> pan(static_cast<std::size_t>(G) * Q);
    for (int k = 0; k < G; ++k)
        for (int q = 0; q < Q; ++q) {
            const double s = rules[k].x[q];
            int i = static_cast<int>(std::upper_bound(S.breaks_.begin(), S.breaks_.end(), s) -
                                     S.breaks_.begin()) - 1;
            pan[k * Q + q] = std::clamp(i, 0, P - 1);
        }

    const Eigen::Index rows = seed.rows(), cols = seed.cols();
    std::vector<Eigen::MatrixXd> Kc(8 * static_cast<std::size_t>(Q));
    std::vector<Eigen::MatrixXd> part(8);  // levels 3..M side by side, per target
    for (int p = 0; p < P; ++p) {
        parallel_for(Kc.size(), [&](std::size_t i) {
            const int k = 8 * p + static_cast<int>(i) / Q, q = static_cast<int>(i) % Q;
            km->build(S.nodes_[k] - rules[k].x[q], nullptr, &Kc[i]);
        });
        // level 2 everywhere and levels >= 3 from earlier panels: one pass over K
        parallel_for(8, [&](std::size_t kk) {
            const int k = 8 * p + static_cast<int>(kk);
            const Rule& r = rules[k];
            const Eigen::MatrixXd* Kk = &Kc[kk * Q];
            Eigen::MatrixXd l2 = Eigen::MatrixXd::Zero(rows, cols);
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols * (M - 2));
            Eigen::MatrixXd X(rows, cols * (M - 2));
            for (int q = 0; q < Q; ++q) {
                l2.noalias() += (r.w[q] * dxd * dxd) * Kk[q] * (Kk[Q - 1 - q] * seed);
                if (pan[k * Q + q] == p) continue;
                for (int m = 3; m <= M; ++m)
                    X.middleCols((m - 3) * cols, cols) = S.interp(lev[m - 3], r.x[q]);
                acc.noalias() += (r.w[q] * dxd) * Kk[q] * X;
            }
            lev[0][k] = std::move(l2);
            part[kk] = std::move(acc);
        });
        // the rest needs level m-1 on this panel first
        for (int m = 3; m <= M; ++m) {
            parallel_for(8, [&](std::size_t kk) {
                const int k = 8 * p + static_cast<int>(kk);
                const Rule& r = rules[k];
                const Eigen::MatrixXd* Kk = &Kc[kk * Q];
                auto acc = part[kk].middleCols((m - 3) * cols, cols);
                for (int q = 0; q < Q; ++q)
                    if (pan[k * Q + q] == p)
                        acc.noalias() += (r.w[q] * dxd) * Kk[q] * S.interp(lev[m - 3], r.x[q]);
                lev[m - 2][k] = acc;
            });
        }
    }
    Kc.clear();

    S.level_sup = {n1, n2};
    for (int m = 3; m <= M; ++m) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(seed.rows(), seed.cols());
        for (int q = 0; q < Q; ++q)
            acc.noalias() += (RT.w[q] * dxd) * KT[q] * S.interp(lev[m - 3], RT.x[q]);
        S.level_sup.push_back(sup_abs(acc));
    }

    // truncation: smallest m_max whose fitted tail is below tol
    bool found = false;
    for (int m = 1; m <= M && !found; ++m) {
        const TailFit f = fit_tail(S.level_sup, m, t_max);
        if (f.tail <= tol) {
            S.m_max = m;
            S.fitted_C = f.C;
            S.fitted_C3 = f.C3;
            S.tail_estimate = f.tail;
            found = true;
        }
    }
    if (!found) {
        const TailFit f = fit_tail(S.level_sup, M, t_max);
        std::ostringstream os;
        os << "parametrix series tail " << f.tail << " exceeds tol " << tol << " at m_max cap " << M
           << " (C=" << f.C << ", C3=" << f.C3 << ", T=" << t_max << ", |K^(" << M
           << ")|=" << S.level_sup.back() << ")";
        throw ConvergenceError(os.str());
    }
    lev.resize(std::max(0, S.m_max - 1));
    if (S.m_max == 1) return S;

    S.hi_.resize(G);
    for (int k = 0; k < G; ++k) {
        S.hi_[k] = lev[0][k];
        for (int m = 3; m <= S.m_max; ++m) S.hi_[k] += lev[m - 2][k];
    }
    if (keep_levels) S.levels_ = std::move(lev);
    return S;
}

Eigen::MatrixXd gamma_apply(const PhiSeries& S, double t) {
    require(t >= 0 && t <= S.t_max * (1 + 1e-12), "time outside the series range");
    const KernelMatrices& km = S.matrices();
    const double dxd = km.coeffs().grid.cell();
    const Eigen::MatrixXd& B = S.seed();
    if (t == 0.0) return B;
    Eigen::MatrixXd Zt;
    km.build(t, &Zt, nullptr);
    Eigen::MatrixXd out = dxd * (Zt * B);
    if (S.m_max == 1 && S.level_sup[0] == 0.0) return out;  // constant coefficients: Phi = 0

    const Rule r = S.quad.rule(t);
    const int Q = static_cast<int>(r.size());
    std::vector<Eigen::MatrixXd> Z(Q), K(Q), part(Q);
    parallel_for(Q, [&](std::size_t q) { km.build(t - r.x[q], &Z[q], &K[q]); });
    parallel_for(Q, [&](std::size_t q) {
        // K(s_q) is K at the mirrored node
        Eigen::MatrixXd ph = dxd * (K[Q - 1 - q] * B);
        if (S.has_higher()) ph += S.higher(r.x[q]);
        part[q] = (r.w[q] * dxd) * (Z[q] * ph);
    });
    for (int q = 0; q < Q; ++q) out += part[q];
    return out;
}

Field gamma(const Coefficients& coeffs, const MultiIndex& beta, double t,
            const TimeQuadrature& quad, double tol, GammaInfo* info) {
    const GridSpec& g = coeffs.grid;
    require(static_cast<int>(beta.size()) == g.dim && g.inside(beta), "beta outside the grid");
    require(t >= 0 && std::isfinite(t), "time must be finite and >= 0");
    quad.validate();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.sites()), 1);
    B(static_cast<Eigen::Index>(g.flat(beta)), 0) = 1.0 / g.cell();
    if (t == 0.0) {
        if (info) *info = GammaInfo{0, 0, 0, 0, quad.nodes};
        return Field::dirac(g, beta);
    }
    auto km = std::make_shared<const KernelMatrices>(coeffs);
    PhiSeries S = phi(km, B, t, quad, tol);
    if (info) *info = GammaInfo{S.m_max, S.fitted_C, S.fitted_C3, S.tail_estimate, quad.nodes};
    Eigen::MatrixXd col = gamma_apply(S, t);
    return Field(g, std::vector<double>(col.data(), col.data() + col.size()));
}

TwoPointField gamma_full(const Coefficients& coeffs, double t, const TimeQuadrature& quad,
                         double tol) {
    const GridSpec& g = coeffs.grid;
    require(t > 0 && std::isfinite(t), "time must be positive");
    const auto n = static_cast<Eigen::Index>(g.sites());
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n) / g.cell();
    auto km = std::make_shared<const KernelMatrices>(coeffs);
    PhiSeries S = phi(km, B, t, quad, tol);
    return to_two_point(g, gamma_apply(S, t));
}

double propagation_defect(const Coefficients& coeffs, double s, double t,
                          const TimeQuadrature& quad, double tol) {
    require(t > 0 && s > 0 && s < t, "need 0 < s < t");
    const GridSpec& g = coeffs.grid;
    const auto n = static_cast<Eigen::Index>(g.sites());
    const double dxd = g.cell();
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n) / dxd;
    auto km = std::make_shared<const KernelMatrices>(coeffs);
    PhiSeries S = phi(km, B, t, quad, tol);
    const Eigen::MatrixXd Gt = gamma_apply(S, t);
    const Eigen::MatrixXd Gs = gamma_apply(S, s);
    const Eigen::MatrixXd Gr = (t - s == s) ? Gs : gamma_apply(S, t - s);
    const Eigen::MatrixXd prod = dxd * (Gs * Gr);
    return (Gt - prod).cwiseAbs().maxCoeff() * dxd;
}

}  // namespace sdheat
