#include "sdheat/sdheat.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <set>
#include <string>

#include "sdheat/coefficients.hpp"
#include "sdheat/heat_const.hpp"
#include "sdheat/oracle.hpp"
#include "sdheat/parallel.hpp"
#include "sdheat/parametrix.hpp"
#include "sdheat/solver.hpp"
#include "sdheat/verify.hpp"

struct sdh_grid {
    sdheat::GridSpec g;
};
struct sdh_coeffs {
    sdheat::Coefficients c;
};
struct sdh_field {
    sdheat::Field f;
};

namespace {

thread_local std::string last_error;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
sdh_status guard(F&& body) {
    try {
        body();
        last_error.clear();
        return SDH_OK;
    } catch (const sdheat::ConvergenceError& e) {
        last_error = e.what();
        return SDH_ERR_CONVERGENCE;
    } catch (const IoError& e) {
        last_error = e.what();
        return SDH_ERR_IO;
    } catch (const std::invalid_argument& e) {
        last_error = e.what();
        return SDH_ERR_ARGUMENT;
    } catch (const std::out_of_range& e) {
        last_error = std::string("value out of range: ") + e.what();
        return SDH_ERR_ARGUMENT;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SDH_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SDH_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return SDH_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) throw std::invalid_argument(std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

sdheat::Boundary boundary(int periodic) {
    return periodic ? sdheat::Boundary::periodic : sdheat::Boundary::zero;
}

sdheat::MultiIndex beta_of(const sdheat::GridSpec& g, const int* beta) {
    sdheat::MultiIndex b(g.dim, 0);
    if (beta)
        for (int j = 0; j < g.dim; ++j) b[j] = beta[j];
    return b;
}

sdheat::TimeQuadrature quad(int nodes) {
    sdheat::TimeQuadrature q;
    if (nodes > 0) q.nodes = nodes;
    return q;
}

template <class T>
T json_or(const nlohmann::json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

extern "C" {

const char* sdh_last_error(void) { return last_error.c_str(); }

const char* sdh_version(void) { return "1.0.0"; }

void sdh_set_threads(int n) { sdheat::set_thread_cap(n); }

void sdh_free_string(char* s) { std::free(s); }

sdh_status sdh_grid_create(double dx, int dim, int radius, int periodic, sdh_grid** out) {
    return guard([&] {
        need(out, "out");
        *out = new sdh_grid{sdheat::GridSpec(dx, dim, radius, boundary(periodic))};
    });
}

void sdh_grid_destroy(sdh_grid* g) { delete g; }

size_t sdh_grid_sites(const sdh_grid* g) { return g ? g->g.sites() : 0; }

int sdh_grid_dim(const sdh_grid* g) { return g ? g->g.dim : 0; }

sdh_status sdh_coeffs_parse(const sdh_grid* g, const char* spec, sdh_coeffs** out) {
    return guard([&] {
        need(g, "grid");
        need(spec, "spec");
        need(out, "out");
        *out = new sdh_coeffs{sdheat::Coefficients::parse(g->g, spec)};
    });
}

sdh_status sdh_coeffs_create(const sdh_grid* g, const double* values, sdh_coeffs** out) {
    return guard([&] {
        need(g, "grid");
        need(values, "values");
        need(out, "out");
        const std::size_t n = g->g.sites() * g->g.dim;
        *out = new sdh_coeffs{sdheat::Coefficients(g->g, std::vector<double>(values, values + n))};
    });
}

void sdh_coeffs_destroy(sdh_coeffs* c) { delete c; }

sdh_status sdh_field_create(const sdh_grid* g, const double* values, sdh_field** out) {
    return guard([&] {
        need(g, "grid");
        need(out, "out");
        sdheat::Field f(g->g);
        if (values) std::copy(values, values + f.size(), f.values().begin());
        *out = new sdh_field{std::move(f)};
    });
}

sdh_status sdh_field_parse(const sdh_grid* g, const char* spec, sdh_field** out) {
    return guard([&] {
        need(g, "grid");
        need(spec, "spec");
        need(out, "out");
        *out = new sdh_field{sdheat::parse_field(g->g, spec)};
    });
}

sdh_status sdh_field_read_csv(const char* path, double dx, int periodic, sdh_field** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        std::ifstream is(path);
        if (!is) throw IoError(std::string("cannot open ") + path);
        *out = new sdh_field{sdheat::read_field_csv(is, dx, boundary(periodic))};
    });
}

sdh_status sdh_field_write_csv(const sdh_field* f, const char* path) {
    return guard([&] {
        need(f, "field");
        need(path, "path");
        try {
            sdheat::atomic_write(path, [&](std::ostream& os) { sdheat::write_csv(os, f->f); });
        } catch (const sdheat::ArgumentError&) {
            throw;
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
    });
}

sdh_status sdh_field_to_csv(const sdh_field* f, char** text) {
    return guard([&] {
        need(f, "field");
        need(text, "text");
        std::ostringstream os;
        sdheat::write_csv(os, f->f);
        *text = dup(os.str());
    });
}

size_t sdh_field_size(const sdh_field* f) { return f ? f->f.size() : 0; }

const double* sdh_field_data(const sdh_field* f) { return f ? f->f.values().data() : nullptr; }

double sdh_field_dx(const sdh_field* f) { return f ? f->f.grid().dx : 0.0; }

int sdh_field_dim(const sdh_field* f) { return f ? f->f.grid().dim : 0; }

int sdh_field_radius(const sdh_field* f) { return f ? f->f.grid().radius : 0; }

void sdh_field_destroy(sdh_field* f) { delete f; }

sdh_status sdh_kernel(const sdh_grid* g, const double* c, double t, sdh_field** out) {
    return guard([&] {
        need(g, "grid");
        need(c, "c");
        need(out, "out");
        sdheat::require(t > 0 && std::isfinite(t), "t must be positive");
        sdheat::ConstCoeffs cc(std::vector<double>(c, c + g->g.dim));
        *out = new sdh_field{sdheat::kernel_slice(g->g, t, cc)};
    });
}

sdh_status sdh_gamma(const sdh_coeffs* c, const int* beta, double t, int quad_nodes, double tol,
                     sdh_gamma_info* info, sdh_field** out) {
    return guard([&] {
        need(c, "coefficients");
        need(out, "out");
        sdheat::GammaInfo gi;
        sdheat::Field f = sdheat::gamma(c->c, beta_of(c->c.grid, beta), t, quad(quad_nodes), tol, &gi);
        if (info) *info = sdh_gamma_info{gi.m_max, gi.fitted_C, gi.fitted_C3, gi.tail_estimate, gi.quad_nodes};
        *out = new sdh_field{std::move(f)};
    });
}

sdh_status sdh_oracle(const sdh_coeffs* c, const int* beta, double t, double tol, sdh_field** out) {
    return guard([&] {
        need(c, "coefficients");
        need(out, "out");
        *out = new sdh_field{sdheat::gamma_oracle(c->c, beta_of(c->c.grid, beta), t, tol)};
    });
}

sdh_status sdh_compare(const sdh_field* a, const sdh_field* b, double* l1, double* l2, double* linf) {
    return guard([&] {
        need(a, "a");
        need(b, "b");
        sdheat::require(a->f.grid() == b->f.grid(), "fields live on different grids");
        sdheat::Field d = a->f;
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= b->f[k];
        if (l1) *l1 = sdheat::lp_norm(d, 1.0);
        if (l2) *l2 = sdheat::lp_norm(d, 2.0);
        if (linf) *linf = sdheat::lp_norm(d, sdheat::inf_norm);
    });
}

sdh_status sdh_solve(const sdh_coeffs* c, const sdh_field* psi, const sdh_field* source,
                     const sdh_field* potential, const double* times, int ntimes, int quad_nodes,
                     double tol, sdh_solve_report* report, sdh_field** out) {
    return guard([&] {
        need(c, "coefficients");
        need(psi, "psi");
        need(times, "times");
        need(out, "out");
        sdheat::require(ntimes >= 1, "need at least one time");
        std::vector<double> ts(times, times + ntimes);
        for (int i = 0; i < ntimes; ++i) {
            sdheat::require(ts[i] > 0 && std::isfinite(ts[i]), "times must be positive");
            if (i) sdheat::require(ts[i] > ts[i - 1], "times must increase");
        }
        const sdheat::Field f = source ? source->f : sdheat::Field(c->c.grid);
        sdheat::CauchyProblem prob{c->c, psi->f, [f](double) { return f; }, std::nullopt, ts.back()};
        if (potential) prob.potential = potential->f;
        const auto q = quad(quad_nodes);
        sdheat::SolveReport rep;
        std::vector<sdheat::Field> u;
        if (!potential) {
            u = sdheat::solve_inhomogeneous(prob, ts, q, tol, &rep);
        } else {
            // equal slices T k/n run as one Picard sweep; other layouts one by one
            bool slices = true;
            for (int i = 0; i < ntimes; ++i)
                slices = slices && std::abs(ts[i] - ts.back() * (i + 1) / ntimes) <= 1e-12 * ts.back();
            if (slices) {
                u = sdheat::solve_with_potential(prob, ts.back(), ntimes, q, tol, 50, &rep);
            } else {
                for (double t : ts) {
                    sdheat::SolveReport r1;
                    u.push_back(sdheat::solve_with_potential(prob, t, q, tol, 50, &r1));
                    rep.panels += r1.panels;
                    rep.picard_iters += r1.picard_iters;
                    rep.halvings = std::max(rep.halvings, r1.halvings);
                    rep.fixed_point_residual = std::max(rep.fixed_point_residual, r1.fixed_point_residual);
                    rep.m_max = std::max(rep.m_max, r1.m_max);
                    rep.seed_columns = r1.seed_columns;
                }
            }
        }
        double res = std::numeric_limits<double>::quiet_NaN();
        bool uniform = ntimes >= 3;
        for (int i = 2; i < ntimes && uniform; ++i) {
            const double h0 = ts[1] - ts[0], h = ts[i] - ts[i - 1];
            uniform = std::abs(h - h0) <= 1e-9 * h0;
        }
        if (uniform) {
            sdheat::Generator gen = potential ? sdheat::Generator(c->c, potential->f) : sdheat::Generator(c->c);
            res = sdheat::residual(u, gen, [f](double) { return f; }, ts);
        }
        if (report)
            *report = sdh_solve_report{rep.panels, rep.picard_iters, rep.halvings, rep.fixed_point_residual,
                                       rep.m_max, rep.seed_columns, res};
        for (int i = 0; i < ntimes; ++i) out[i] = new sdh_field{std::move(u[i])};
    });
}

sdh_status sdh_bound_check(const char* config_json, char** json_out) {
    return guard([&] {
        need(config_json, "config");
        need(json_out, "out");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("bad bound config: ") + e.what());
        }
        sdheat::require(j.is_object(), "bound config must be a JSON object");
        static const std::set<std::string> known = {"bound", "dim",         "m",         "c",
                                                    "dxs",   "t_min",       "t_max",     "per_decade",
                                                    "x_halfwidth", "alpha_max", "C1", "eta_halfwidth"};
        for (auto it = j.begin(); it != j.end(); ++it)
            sdheat::require(known.count(it.key()) > 0, "unknown bound config key: " + it.key());
        sdheat::BoundCheckConfig cfg;
        try {
            cfg.bound = json_or(j, "bound", cfg.bound);
            cfg.dim = json_or(j, "dim", cfg.dim);
            cfg.m = json_or(j, "m", cfg.m);
            cfg.c = json_or(j, "c", cfg.c);
            cfg.dxs = json_or(j, "dxs", cfg.dxs);
            cfg.t_min = json_or(j, "t_min", cfg.t_min);
            cfg.t_max = json_or(j, "t_max", cfg.t_max);
            cfg.per_decade = json_or(j, "per_decade", cfg.per_decade);
            cfg.x_halfwidth = json_or(j, "x_halfwidth", cfg.x_halfwidth);
            cfg.alpha_max = json_or(j, "alpha_max", cfg.alpha_max);
            cfg.C1 = json_or(j, "C1", cfg.C1);
            cfg.eta_halfwidth = json_or(j, "eta_halfwidth", cfg.eta_halfwidth);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("bad bound config: ") + e.what());
        }
        *json_out = dup(sdheat::to_json(sdheat::bound_check(cfg)));
    });
}

int sdh_suite_count(void) { return static_cast<int>(sdheat::suite_names().size()); }

const char* sdh_suite_name(int i) {
    const auto& names = sdheat::suite_names();
    return i >= 0 && i < static_cast<int>(names.size()) ? names[i].c_str() : nullptr;
}

sdh_status sdh_verify(const char* suite, uint64_t seed, int* pass, char** json_out) {
    return guard([&] {
        need(suite, "suite");
        need(json_out, "out");
        sdheat::SuiteReport r = sdheat::run_suite(suite, sdheat::VerifyOptions{seed});
        if (pass) *pass = r.pass ? 1 : 0;
        *json_out = dup(r.to_json().dump(2));
    });
}

}  // extern "C"
