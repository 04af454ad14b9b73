#include "sdheat/verify.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "sdheat/bessel.hpp"
#include "sdheat/bounds.hpp"
#include "sdheat/coefficients.hpp"
#include "sdheat/heat_const.hpp"
#include "sdheat/oracle.hpp"
#include "sdheat/parallel.hpp"
#include "sdheat/parametrix.hpp"
#include "sdheat/solver.hpp"

namespace sdheat {

using json = nlohmann::ordered_json;

namespace {

struct SuiteInfo {
    const char* criterion;
    double budget;
};

const std::map<std::string, SuiteInfo>& registry() {
    static const std::map<std::string, SuiteInfo> r = {
        {"mass", {"AC-1", 5}},          {"bessel-cross", {"AC-2", 10}},
        {"spectral-cross", {"AC-3", 20}}, {"lorentz-kernel", {"AC-4", 60}},
        {"gaussian", {"AC-5", 30}},     {"gamma-oracle", {"AC-6", 120}},
        {"propagation", {"AC-7", 120}}, {"lorentz-conv", {"AC-8", 10}},
        {"prop53", {"AC-9", 60}},       {"duhamel", {"AC-10", 60}},
        {"potential", {"AC-11", 120}},  {"pang", {"AC-12", 20}},
    };
    return r;
}

double log_grid(double lo, double hi, int i, int n) {
    return std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
}

// points per decade, inclusive ends
std::vector<double> decades(double lo, double hi, int per_decade) {
    const int n = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade)) + 1;
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = log_grid(lo, hi, i, n);
    return t;
}

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

json report_json(const BoundReport& r) {
    json per = json::array();
    for (auto& [dx, c] : r.per_dx) per.push_back({{"dx", dx}, {"constant", c}});
    return {{"sup_ratio", r.sup_ratio},
            {"argmax", {{"alpha", r.argmax_alpha}, {"t", r.argmax_t}}},
            {"samples", r.samples},
            {"per_dx", per},
            {"spread", r.spread()},
            {"t_range", {r.t_min, r.t_max}}};
}

// 1-D lattice on the box |x| <= 4 used by the parametrix criteria
struct SineSetup {
    GridSpec grid{1.0 / 16, 1, 64};
    Coefficients coeffs = Coefficients::sine(grid, 1.0, 0.5, 1.0);
    double T = 0.25;
    double tol = 1e-8;
};

json sine_echo(const SineSetup& s) {
    return {{"dx", s.grid.dx}, {"radius", s.grid.radius}, {"dim", 1}, {"boundary", "periodic"},
            {"coeff", "sine:1,0.5,1"}, {"T", s.T}, {"tol", s.tol}};
}

// ---- AC-1
SuiteReport suite_mass(const VerifyOptions&) {
    SuiteReport r;
    double worst = 0.0;
    int streamed = 0;
    json cases = json::array();
    for (int d = 1; d <= 2; ++d)
        for (double dx : {1.0, 0.25, 1.0 / 16})
            for (double t : {0.1, 1.0, 10.0}) {
                const int radius = recommended_radius(1.0, t, dx);
                GridSpec g(dx, d, radius);
                long double mass = 0.0L;
                if (g.sites() <= 4000000) {
                    Field a = kernel_slice(g, t, ConstCoeffs::isotropic(d, 1.0));
                    for (double v : a.values()) mass += static_cast<long double>(v) * g.cell();
                } else {
                    // product kernel summed site by site without storing the field
                    ++streamed;
                    KernelLine line = kernel_line(1.0, t, dx, radius, Boundary::periodic);
                    for (int k2 = -radius; k2 <= radius; ++k2) {
                        long double row = 0.0L;
                        const double w = line(k2);
                        for (int k1 = -radius; k1 <= radius; ++k1) row += static_cast<long double>(line(k1)) * w;
                        mass += row * g.cell();
                    }
                }
                const double dev = std::abs(static_cast<double>(mass) - 1.0);
                worst = std::max(worst, dev);
                cases.push_back({{"d", d}, {"dx", dx}, {"t", t}, {"radius", radius}, {"deviation", dev}});
            }
    r.metrics = {{"max_deviation", worst}, {"threshold", 1e-12}, {"streamed_cases", streamed}, {"cases", cases}};
    r.config_echo = {{"dims", {1, 2}}, {"dx", {1.0, 0.25, 0.0625}}, {"t", {0.1, 1.0, 10.0}},
                     {"c", 1.0}, {"radius_rule", "r + 40 sqrt(r+1)"}};
    r.pass = worst <= 1e-12;
    return r;
}

// ---- AC-2
SuiteReport suite_bessel(const VerifyOptions&) {
    SuiteReport r;
    const auto rs = decades(1e-3, 1e4, 10);
    std::vector<double> worst(rs.size(), 0.0);
    std::vector<long> worst_n(rs.size(), 0);
    parallel_for(rs.size(), [&](std::size_t i) {
        const auto seq = iv_scaled_sequence(60, rs[i]);
        for (long n = 0; n <= 60; ++n) {
            const double q = iv_scaled_quadrature(n, rs[i]);
            const double a = iv_scaled(n, rs[i]);
            // the recurrence-based sequence is checked too
            const double e = std::max(std::abs(a - q), std::abs(seq[n] - q)) / std::abs(q);
            if (e > worst[i]) {
                worst[i] = e;
                worst_n[i] = n;
            }
        }
    });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < rs.size(); ++i)
        if (worst[i] > worst[arg]) arg = i;
    r.metrics = {{"max_rel_error", worst[arg]}, {"argmax", {{"n", worst_n[arg]}, {"r", rs[arg]}}},
                 {"threshold", 1e-10}, {"samples", 61 * rs.size()}};
    r.config_echo = {{"n_max", 60}, {"r_range", {1e-3, 1e4}}, {"points_per_decade", 10}};
    r.pass = worst[arg] <= 1e-10;
    return r;
}

// ---- AC-3
int spectral_nodes(long alpha, double r) {
    int m = 64;
    while (m < 2 * (std::labs(alpha) + r + 40 * std::sqrt(r + 1))) m *= 2;
    return m;
}

SuiteReport suite_spectral(const VerifyOptions& opt) {
    SuiteReport r;
    std::mt19937_64 rng(opt.seed);
    double worst_spec = 0.0, worst_series = 0.0;
    std::size_t n_spec = 0, n_series = 0, skipped_series = 0;
    for (int d = 1; d <= 2; ++d)
        for (double dx : {1.0, 0.25, 1.0 / 16})
            for (double t : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
                const ConstCoeffs c = d == 1 ? ConstCoeffs({1.0}) : ConstCoeffs({1.0, 0.5});
                const double rr = 2 * c.cbar() * t / (dx * dx);
                const double scale = std::pow(dx, d);
                // fixed box plus seeded random offsets
                std::vector<MultiIndex> pts;
                for (int a = -8; a <= 8; ++a) pts.push_back(d == 1 ? MultiIndex{a} : MultiIndex{a, -a / 2});
                std::uniform_int_distribution<int> u(-40, 40);
                for (int k = 0; k < 8; ++k) pts.push_back(d == 1 ? MultiIndex{u(rng)} : MultiIndex{u(rng), u(rng)});
                for (const auto& al : pts) {
                    long amax = 0;
                    for (int v : al) amax = std::max<long>(amax, std::abs(v));
                    const double e = std::abs(kernel_nd(al, t, c, dx) -
                                              kernel_spectral(al, t, c, dx, spectral_nodes(amax, rr)));
                    worst_spec = std::max(worst_spec, e * scale / 1e-9);
                    ++n_spec;
                }
                GridSpec g(dx, d, std::max(8, recommended_radius(c.cbar(), t, dx)));
                const int terms = 40;
                if (g.sites() > 200000 || series_tail_bound(g, t, c, terms) > 1e-12) {
                    ++skipped_series;
                    continue;
                }
                Field s = kernel_series_smalltime(g, t, c, terms);
                for (std::size_t q = 0; q < s.size(); ++q) {
                    MultiIndex al = g.index(q);
                    bool near = true;
                    for (int v : al) near = near && std::abs(v) <= 8;
                    if (!near) continue;
                    const double e = std::abs(s[q] - kernel_nd(al, t, c, dx));
                    worst_series = std::max(worst_series, e * scale / 1e-10);
                    ++n_series;
                }
            }
    r.metrics = {{"spectral_max_scaled_error", worst_spec},
                 {"series_max_scaled_error", worst_series},
                 {"note", "errors are divided by their thresholds; pass needs both <= 1"},
                 {"spectral_samples", n_spec},
                 {"series_samples", n_series},
                 {"series_inadmissible_cases", skipped_series}};
    r.config_echo = {{"dims", {1, 2}}, {"dx", {1.0, 0.25, 0.0625}}, {"t", {1e-3, 1e-2, 1e-1, 1.0, 10.0}},
                     {"c", {{"d1", {1.0}}, {"d2", {1.0, 0.5}}}}, {"series_terms", 40}, {"seed", opt.seed}};
    r.pass = worst_spec <= 1.0 && worst_series <= 1.0 && n_series > 0;
    return r;
}

// ---- AC-4
SuiteReport suite_lorentz_kernel(const VerifyOptions&) {
    SuiteReport r;
    BoundCheckConfig cfg;
    cfg.t_min = 1e-6;
    json per_m = json::object();
    bool pass = true;
    for (int m = 0; m <= 2; ++m) {
        cfg.m = m;
        const BoundReport rep = bound_check(cfg);
        const bool ok = std::isfinite(rep.sup_ratio) && rep.spread() < 0.10;
        pass = pass && ok;
        json j = report_json(rep);
        j["pass"] = ok;
        per_m["m" + std::to_string(m)] = j;
    }
    r.metrics = {{"per_m", per_m}, {"spread_threshold", 0.10}};
    r.config_echo = {{"dim", 1}, {"c", cfg.c}, {"dx", cfg.dxs}, {"t_range", {cfg.t_min, cfg.t_max}},
                     {"t_points_per_decade", cfg.per_decade}, {"x_halfwidth", cfg.x_halfwidth}, {"cubic_tail", true}};
    r.pass = pass;
    return r;
}

// ---- AC-5
SuiteReport suite_gaussian(const VerifyOptions&) {
    SuiteReport r;
    const auto ts = decades(1e-3, 10.0, 40);
    const int A = 64;
    const std::vector<double> cvals = {0.5, 1.0, 2.0};
    double worst_log = -INFINITY;
    json argmax;
    std::size_t in_region = 0, underflow = 0;
    for (int d = 1; d <= 2; ++d)
        for (double dx : {1.0, 0.25})
            for (std::size_t c1 = 0; c1 < cvals.size(); ++c1)
                for (std::size_t c2 = 0; c2 < (d == 2 ? cvals.size() : 1); ++c2) {
                    ConstCoeffs c = d == 1 ? ConstCoeffs({cvals[c1]}) : ConstCoeffs({cvals[c1], cvals[c2]});
                    for (double t : ts) {
                        // log of the 1-D factors; kernel_nd is their product
                        std::vector<std::vector<double>> lg(d);
                        for (int j = 0; j < d; ++j) {
                            auto seq = iv_scaled_sequence(A, 2 * c.c[j] * t / (dx * dx));
                            lg[j].resize(A + 1);
                            for (int n = 0; n <= A; ++n) lg[j][n] = std::log(seq[n] / dx);
                        }
                        const int a2max = d == 2 ? A : 0;
                        for (int a2 = -a2max; a2 <= a2max; ++a2)
                            for (int a1 = -A; a1 <= A; ++a1) {
                                MultiIndex al = d == 1 ? MultiIndex{a1} : MultiIndex{a1, a2};
                                GaussianValue gv = gaussian_rhs(al, t, c, dx);
                                if (!gv.in_region) continue;
                                ++in_region;
                                double lk = lg[0][std::abs(a1)];
                                if (d == 2) lk += lg[1][std::abs(a2)];
                                if (!std::isfinite(lk)) {
                                    ++underflow;
                                    continue;
                                }
                                const double lr = lk - gv.log_rhs;
                                if (lr > worst_log) {
                                    worst_log = lr;
                                    argmax = {{"alpha", al}, {"t", t}, {"dx", dx}, {"c", c.c}};
                                }
                            }
                    }
                }
    const double ratio = std::exp(worst_log);
    r.metrics = {{"max_ratio", ratio}, {"argmax", argmax}, {"slack", 1e-12},
                 {"in_region_samples", in_region}, {"kernel_underflows", underflow}};
    r.config_echo = {{"dims", {1, 2}}, {"dx", {1.0, 0.25}}, {"c_values", cvals}, {"alpha_box", A},
                     {"t_range", {1e-3, 10.0}}, {"t_points_per_decade", 40}, {"C0", gaussian_C0}};
    r.pass = ratio <= 1 + 1e-12 && underflow == 0 && in_region > 0;
    return r;
}

// ---- AC-6
SuiteReport suite_gamma_oracle(const VerifyOptions&) {
    SuiteReport r;
    SineSetup s;
    const Field o = gamma_oracle(s.coeffs, {0}, s.T, 1e-12);
    std::vector<Field> cols;
    json levels = json::array();
    std::vector<double> l1;
    for (int nodes : {96, 192, 384}) {
        TimeQuadrature q;
        q.nodes = nodes;
        GammaInfo info;
        cols.push_back(gamma(s.coeffs, {0}, s.T, q, s.tol, &info));
        double d = 0.0;
        for (std::size_t k = 0; k < o.size(); ++k) d += std::abs(cols.back()[k] - o[k]) * s.grid.dx;
        l1.push_back(d);
        levels.push_back(json{{"nodes", nodes}, {"l1", d}, {"m_max", info.m_max}, {"fitted_C3", info.fitted_C3},
                          {"tail_estimate", info.tail_estimate}});
    }
    // distance to the finest rule: the quadrature part of the error alone
    double refine = 0.0;
    for (std::size_t k = 0; k < o.size(); ++k) refine += std::abs(cols[0][k] - cols[2][k]) * s.grid.dx;
    const bool accurate = l1[0] <= 1e-2;
    const bool monotone = l1[1] < l1[0] && l1[2] < l1[1];
    r.metrics = {{"levels", levels}, {"l1_threshold", 1e-2}, {"accurate", accurate}, {"monotone", monotone},
                 {"l1_96_vs_384", refine}, {"oracle_tol", 1e-12}};
    r.config_echo = sine_echo(s);
    r.config_echo["beta"] = json::array({0});
    r.config_echo["quad_nodes"] = json::array({96, 192, 384});
    r.pass = accurate && monotone;
    return r;
}

// ---- AC-7
SuiteReport suite_propagation(const VerifyOptions&) {
    SuiteReport r;
    SineSetup s;
    TimeQuadrature q;
    const double var = propagation_defect(s.coeffs, s.T / 2, s.T, q, s.tol);
    const double flat = propagation_defect(Coefficients::constant(s.grid, 1.0), s.T / 2, s.T, q, s.tol);
    r.metrics = {{"defect", var}, {"defect_threshold", 1e-2}, {"constant_defect", flat},
                 {"constant_threshold", 1e-11}};
    r.config_echo = sine_echo(s);
    r.config_echo["s"] = s.T / 2;
    r.config_echo["quad_nodes"] = q.nodes;
    r.pass = var <= 1e-2 && flat <= 1e-11;
    return r;
}

// ---- AC-8
SuiteReport suite_lorentz_conv(const VerifyOptions&) {
    SuiteReport r;
    const int N = 20;
    double worst_rel = 0.0, worst_bound = 0.0;
    json arg;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l) {
                const double z = -5 + 10.0 * i / (N - 1);
                const double t = log_grid(1e-2, 10.0, k, N);
                const double s = t * (0.01 + 0.98 * l / (N - 1));
                const double cf = lorentz_closed_form(z, 0.0, s, t);
                const double qd = lorentz_quadrature(z, 0.0, s, t);
                const double rel = std::abs(cf - qd) / qd;
                if (rel > worst_rel) {
                    worst_rel = rel;
                    arg = {{"x_minus_y", z}, {"s", s}, {"t", t}};
                }
                worst_bound = std::max(worst_bound, cf / (std::numbers::pi * lorentz_tilde(t, z)));
            }
    r.metrics = {{"max_rel_error", worst_rel}, {"argmax", arg}, {"rel_threshold", 1e-8},
                 {"max_bound_ratio", worst_bound}, {"bound_ratio_limit", std::sqrt(2.0)}, {"samples", N * N * N}};
    r.config_echo = {{"x_minus_y", {-5.0, 5.0}}, {"t_range", {1e-2, 10.0}}, {"s_over_t", {0.01, 0.99}}, {"box", N}};
    r.pass = worst_rel <= 1e-8 && worst_bound <= std::sqrt(2.0);
    return r;
}

// ---- AC-9
SuiteReport suite_prop53(const VerifyOptions&) {
    SuiteReport r;
    BoundCheckConfig cfg;
    cfg.bound = "prop53";
    cfg.dxs = {0.25, 1.0 / 16};
    cfg.per_decade = 3;
    const BoundReport rep = bound_check(cfg);
    r.metrics = report_json(rep);
    r.metrics["spread_threshold"] = 0.15;
    r.config_echo = {{"dim", 1}, {"C1", cfg.C1}, {"dx", cfg.dxs}, {"t_range", {cfg.t_min, cfg.t_max}},
                     {"t_points_per_decade", cfg.per_decade}, {"alpha_halfwidth", cfg.x_halfwidth},
                     {"eta_halfwidth", cfg.eta_halfwidth}, {"s_grid", "earlier t nodes, t minus them, t/2"}};
    r.pass = std::isfinite(rep.sup_ratio) && rep.spread() < 0.15;
    return r;
}

// ---- AC-10
SuiteReport suite_duhamel(const VerifyOptions&) {
    SuiteReport r;
    SineSetup s;
    const GridSpec& g = s.grid;
    const double ell = g.side() * g.dx;
    Field psi = Field::from_function(g, [&](const MultiIndex& a) { return std::cos(2 * std::numbers::pi * a[0] * g.dx / ell); });
    Field f = Field::from_function(g, [&](const MultiIndex& a) {
        return 0.5 + 0.5 * std::sin(2 * std::numbers::pi * a[0] * g.dx / ell);
    });
    const double h = 1e-3;
    const std::vector<double> times = {s.T - h, s.T, s.T + h};
    CauchyProblem p{s.coeffs, psi, [&](double) { return f; }, std::nullopt, s.T + h};
    TimeQuadrature q;
    SolveReport rep;
    auto u = solve_inhomogeneous(p, times, q, s.tol, &rep);
    const double res = residual(u, Generator(s.coeffs), [&](double) { return f; }, times);
    const double bound = 1e-4 * (lp_norm(psi, inf_norm) + lp_norm(f, inf_norm));
    const Field o = expm_apply(Generator(s.coeffs), s.T, psi, 1e-12, &f);
    r.metrics = {{"residual", res}, {"threshold", bound}, {"vs_oracle_sup", sup_diff(u[1], o)},
                 {"m_max", rep.m_max}, {"seed_columns", rep.seed_columns}};
    r.config_echo = sine_echo(s);
    r.config_echo["h"] = h;
    r.config_echo["psi"] = "cos(2 pi x / L)";
    r.config_echo["f"] = "0.5 + 0.5 sin(2 pi x / L)";
    r.config_echo["quad_nodes"] = q.nodes;
    r.pass = res <= bound;
    return r;
}

// ---- AC-11
struct PotentialRun {
    Field u;
    SolveReport rep;
    double vs_oracle = 0;
};

PotentialRun potential_run(double dx, int radius, double tol) {
    GridSpec g(dx, 1, radius);
    auto c = Coefficients::sine(g, 1.0, 0.5, 1.0);
    const double ell = g.side() * g.dx;
    auto wave = [&](double phase) {
        return Field::from_function(g, [&](const MultiIndex& a) {
            return std::sin(2 * std::numbers::pi * a[0] * g.dx / ell + phase);
        });
    };
    Field Y = wave(std::numbers::pi / 2), f = wave(0.0);
    for (auto& v : Y.values()) v += 1.0;
    for (auto& v : f.values()) v = 0.5 + 0.5 * v;
    Field psi = Field::from_function(g, [&](const MultiIndex& a) {
        const double x = a[0] * g.dx;
        return std::exp(-x * x);
    });
    CauchyProblem p{c, psi, [&](double) { return f; }, Y, 0.25};
    PotentialRun out;
    out.u = solve_with_potential(p, 0.25, TimeQuadrature{}, tol, 50, &out.rep);
    const Field o = expm_apply(Generator(c, Y), 0.25, psi, 1e-12, &f);
    out.vs_oracle = sup_diff(out.u, o);
    return out;
}

SuiteReport suite_potential(const VerifyOptions&) {
    SuiteReport r;
    const double tol = 1e-8;
    // constant case: c = 1, Y = lambda, psi = 1, f = 0
    double worst_const = 0.0;
    GridSpec g(1.0 / 16, 1, 64);
    for (double lambda : {0.5, 2.0}) {
        CauchyProblem p{Coefficients::constant(g, 1.0), Field(g, 1.0), nullptr, Field(g, lambda), 1.0};
        auto u = solve_with_potential(p, 1.0, 4, TimeQuadrature{}, 1e-12);
        for (int k = 0; k < 4; ++k)
            for (double x : u[k].values()) worst_const = std::max(worst_const, std::abs(x - std::exp(-lambda * 0.25 * (k + 1))));
    }
    const PotentialRun fine = potential_run(1.0 / 16, 64, tol);
    const PotentialRun coarse = potential_run(1.0 / 8, 32, tol);
    const double sup_f = lp_norm(fine.u, inf_norm), sup_c = lp_norm(coarse.u, inf_norm);
    const double gr_f = gradient_sup(fine.u), gr_c = gradient_sup(coarse.u);
    const double var_sup = std::abs(sup_f - sup_c) / std::min(sup_f, sup_c);
    const double var_grad = std::abs(gr_f - gr_c) / std::min(gr_f, gr_c);
    r.metrics = {{"constant_case_error", worst_const}, {"constant_threshold", 1e-8},
                 {"variable_vs_oracle", fine.vs_oracle}, {"variable_threshold", 5e-3},
                 {"coarse_vs_oracle", coarse.vs_oracle},
                 {"sup_norm", {{"dx_1/16", sup_f}, {"dx_1/8", sup_c}, {"variation", var_sup}}},
                 {"gradient_sup", {{"dx_1/16", gr_f}, {"dx_1/8", gr_c}, {"variation", var_grad}}},
                 {"variation_threshold", 0.10},
                 {"panels", fine.rep.panels}, {"picard_iters", fine.rep.picard_iters},
                 {"fixed_point_residual", fine.rep.fixed_point_residual}};
    r.config_echo = {{"coeff", "sine:1,0.5,1"}, {"Y", "1 + cos(2 pi x / L)"}, {"psi", "exp(-x^2)"},
                     {"f", "0.5 + 0.5 sin(2 pi x / L)"}, {"T", 0.25}, {"tol", tol},
                     {"grids", {{{"dx", 0.0625}, {"radius", 64}}, {{"dx", 0.125}, {"radius", 32}}}},
                     {"constant_case", {{"lambda", json::array({0.5, 2.0})}, {"T", 1.0}}}};
    r.pass = worst_const <= 1e-8 && fine.vs_oracle <= 5e-3 && var_sup < 0.10 && var_grad < 0.10;
    return r;
}

// ---- AC-12
BoundReport pang_sweep(int per_decade) {
    BoundCheckConfig cfg;
    cfg.bound = "pang";
    cfg.t_max = 100.0;
    cfg.per_decade = per_decade;
    return bound_check(cfg);
}

SuiteReport suite_pang(const VerifyOptions&) {
    SuiteReport r;
    const BoundReport base = pang_sweep(20), dense = pang_sweep(40);
    const double change = std::abs(dense.sup_ratio - base.sup_ratio) / base.sup_ratio;
    // the estimate says nothing at n = 0; the evaluator must refuse it
    bool origin_rejected = false;
    try {
        pang_rhs(0, 1.0);
    } catch (const ArgumentError&) {
        origin_rejected = true;
    }
    const bool ge1 = base.sup_ratio >= 1.0;
    r.metrics = {{"fitted_C", base.sup_ratio},
                 {"fitted_C_dense", dense.sup_ratio},
                 {"density_change", change},
                 {"argmax", {{"n", base.argmax_alpha}, {"t", base.argmax_t}}},
                 {"samples", base.samples},
                 {"fitted_C_at_least_1", ge1},
                 {"origin_probe_rejected", origin_rejected}};
    r.config_echo = {{"n_range", {1, 64}}, {"t_range", {1e-3, 100.0}}, {"t_points_per_decade", {20, 40}}};
    r.pass = ge1 && std::isfinite(base.sup_ratio) && change < 0.20 && origin_rejected;
    return r;
}

}  // namespace

BoundReport bound_check(const BoundCheckConfig& cfg) {
    require(cfg.t_min > 0 && cfg.t_max > cfg.t_min, "need 0 < t_min < t_max");
    require(cfg.per_decade >= 1, "per_decade must be positive");
    require(cfg.c > 0, "c must be positive");
    require(!cfg.dxs.empty(), "need at least one dx");
    for (double dx : cfg.dxs) require(dx > 0, "dx must be positive");
    const auto ts = decades(cfg.t_min, cfg.t_max, cfg.per_decade);
    const double c = cfg.c;

    if (cfg.bound == "lorentz") {
        require(cfg.dim == 1 || cfg.dim == 2, "lorentz check supports d = 1, 2");
        require(cfg.m >= 0 && cfg.m <= 2, "m must be 0, 1 or 2");
        BoundFitter fit("lorentz_m" + std::to_string(cfg.m));
        for (double dx : cfg.dxs) {
            const int A = static_cast<int>(std::lround(cfg.x_halfwidth / dx));
            LorentzBoundParams p{c, dx, cfg.dim, cfg.m, true};
            for (double t : ts) {
                const auto seq = iv_scaled_sequence(A + 3, 2 * c * t / (dx * dx));
                auto a = [&](int n) { return seq[std::abs(n)] / dx; };
                // grad_+^m along direction 1; the other direction is the plain kernel
                auto diff = [&](int n) {
                    if (cfg.m == 1) return (a(n + 1) - a(n)) / dx;
                    if (cfg.m == 2) return (a(n + 2) - 2 * a(n + 1) + a(n)) / (dx * dx);
                    return a(n);
                };
                const int a2max = cfg.dim == 2 ? A : 0;
                for (int a2 = -a2max; a2 <= a2max; ++a2)
                    for (int a1 = -A; a1 <= A; ++a1) {
                        MultiIndex al = cfg.dim == 1 ? MultiIndex{a1} : MultiIndex{a1, a2};
                        const double q = diff(a1) * (cfg.dim == 2 ? a(a2) : 1.0);
                        fit.add(al, t, dx, q, lorentz_rhs(al, t, p));
                    }
            }
        }
        return fit.report();
    }
    if (cfg.bound == "gaussian") {
        require(cfg.dim == 1 || cfg.dim == 2, "gaussian check supports d = 1, 2");
        BoundFitter fit("gaussian");
        const ConstCoeffs cc = ConstCoeffs::isotropic(cfg.dim, c);
        const int A = cfg.alpha_max;
        for (double dx : cfg.dxs)
            for (double t : ts) {
                auto seq = iv_scaled_sequence(A, 2 * c * t / (dx * dx));
                const int a2max = cfg.dim == 2 ? A : 0;
                for (int a2 = -a2max; a2 <= a2max; ++a2)
                    for (int a1 = -A; a1 <= A; ++a1) {
                        MultiIndex al = cfg.dim == 1 ? MultiIndex{a1} : MultiIndex{a1, a2};
                        GaussianValue gv = gaussian_rhs(al, t, cc, dx);
                        if (!gv.in_region || gv.rhs <= 0) continue;
                        double q = seq[std::abs(a1)] / dx;
                        if (cfg.dim == 2) q *= seq[std::abs(a2)] / dx;
                        fit.add(al, t, dx, q, gv.rhs);
                    }
            }
        require(fit.report().samples > 0, "no samples inside the validity region");
        return fit.report();
    }
    if (cfg.bound == "pang") {
        require(cfg.alpha_max >= 1, "need |n| >= 1");
        BoundFitter fit("pang");
        for (long n = 1; n <= cfg.alpha_max; ++n)
            for (double t : ts)
                for (long sn : {n, -n})
                    fit.add({static_cast<int>(sn)}, t, 1.0, iv_scaled(sn, 2 * t), pang_rhs(sn, t));
        return fit.report();
    }
    if (cfg.bound == "prop53") {
        require(cfg.C1 > 0 && cfg.eta_halfwidth > 0, "C1 and eta_halfwidth must be positive");
        BoundFitter fit("prop53");
        for (double dx : cfg.dxs) {
            const int A = static_cast<int>(std::lround(cfg.x_halfwidth / dx));
            const int M = static_cast<int>(std::lround(cfg.eta_halfwidth / dx));
            for (std::size_t j = 1; j < ts.size(); ++j) {
                const double t = ts[j];
                std::vector<double> ss;
                for (std::size_t i = 0; i < j; ++i) {
                    ss.push_back(ts[i]);
                    ss.push_back(t - ts[i]);
                }
                ss.push_back(t / 2);
                for (double s : ss) {
                    // f(t-s, .) on offsets -(A+M)..A+M, f(s, .) on -M..M
                    std::vector<double> fa(2 * (A + M) + 1), fb(2 * M + 1);
                    for (int k = -(A + M); k <= A + M; ++k) fa[k + A + M] = prop53_f(t - s, {k}, cfg.C1, dx);
                    for (int k = -M; k <= M; ++k) fb[k + M] = prop53_f(s, {k}, cfg.C1, dx);
                    for (int al = -A; al <= A; ++al) {
                        long double sum = 0.0L;
                        for (int eta = -M; eta <= M; ++eta) sum += fa[al - eta + A + M] * fb[eta + M];
                        const double q = static_cast<double>(sum) * dx;
                        const double rhs = std::sqrt(t) * prop53_f(t, {al}, cfg.C1, dx) / std::sqrt(s * (t - s));
                        fit.add({al}, t, dx, q, rhs);
                    }
                }
            }
        }
        return fit.report();
    }
    throw ArgumentError("unknown bound: " + cfg.bound + " (lorentz, gaussian, pang, prop53)");
}

json SuiteReport::to_json() const {
    return {{"suite", suite}, {"pass", pass}, {"metrics", metrics}, {"config_echo", config_echo}};
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "mass", "bessel-cross", "spectral-cross", "lorentz-kernel", "gaussian", "gamma-oracle",
        "propagation", "lorentz-conv", "prop53", "duhamel", "potential", "pang"};
    return names;
}

std::string suite_criterion(const std::string& suite) {
    auto it = registry().find(suite);
    require(it != registry().end(), "unknown suite: " + suite);
    return it->second.criterion;
}

double suite_budget(const std::string& suite) {
    auto it = registry().find(suite);
    require(it != registry().end(), "unknown suite: " + suite);
    return it->second.budget;
}

SuiteReport run_suite(const std::string& suite, const VerifyOptions& opt) {
    suite_criterion(suite);
    SuiteReport r;
    if (suite == "mass") r = suite_mass(opt);
    else if (suite == "bessel-cross") r = suite_bessel(opt);
    else if (suite == "spectral-cross") r = suite_spectral(opt);
    else if (suite == "lorentz-kernel") r = suite_lorentz_kernel(opt);
    else if (suite == "gaussian") r = suite_gaussian(opt);
    else if (suite == "gamma-oracle") r = suite_gamma_oracle(opt);
    else if (suite == "propagation") r = suite_propagation(opt);
    else if (suite == "lorentz-conv") r = suite_lorentz_conv(opt);
    else if (suite == "prop53") r = suite_prop53(opt);
    else if (suite == "duhamel") r = suite_duhamel(opt);
    else if (suite == "potential") r = suite_potential(opt);
    else r = suite_pang(opt);
    r.suite = suite;
    r.config_echo["seed"] = opt.seed;
    r.config_echo["threads"] = thread_cap();
    return r;
}

}  // namespace sdheat
