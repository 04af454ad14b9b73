#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sdheat/sdheat.h"

using json = nlohmann::ordered_json;

namespace {

// every flag of every subcommand; serialised whole so a dump reloads bit-exactly
struct RunConfig {
    std::string subcommand;
    double dx = 1.0;
    int radius = 32;
    int dim = 1;
    std::string boundary = "periodic";
    std::string coeff = "const:1";
    std::vector<double> c = {1.0};
    double t = 1.0;
    double tol = 1e-8;
    int quad_nodes = 96;
    std::vector<int> beta;
    std::string a, b;
    std::string norm = "l1";
    std::string bound = "lorentz";
    int m = 0;
    std::vector<double> dxs = {0.25, 0.125, 0.0625};
    double t_min = 1e-3, t_max = 10.0;
    int per_decade = 40;
    double x_halfwidth = 4.0;
    int alpha_max = 64;
    std::string psi = "const:0";
    std::string source, potential;
    std::vector<double> times;
    std::string out = "-";
    std::string meta;
    std::string suite;
    std::uint64_t seed = 1;
    int threads = 0;
};

json to_json(const RunConfig& r) {
    return {{"subcommand", r.subcommand}, {"dx", r.dx}, {"radius", r.radius}, {"dim", r.dim},
            {"boundary", r.boundary}, {"coeff", r.coeff}, {"c", r.c}, {"t", r.t}, {"tol", r.tol},
            {"quad_nodes", r.quad_nodes}, {"beta", r.beta}, {"a", r.a}, {"b", r.b}, {"norm", r.norm},
            {"bound", r.bound}, {"m", r.m}, {"dxs", r.dxs}, {"t_min", r.t_min}, {"t_max", r.t_max},
            {"per_decade", r.per_decade}, {"x_halfwidth", r.x_halfwidth}, {"alpha_max", r.alpha_max},
            {"psi", r.psi}, {"source", r.source}, {"potential", r.potential}, {"times", r.times},
            {"out", r.out}, {"meta", r.meta}, {"suite", r.suite}, {"seed", r.seed}, {"threads", r.threads}};
}

template <class T>
void take(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

void from_json(const json& j, RunConfig& r) {
    take(j, "dx", r.dx), take(j, "radius", r.radius), take(j, "dim", r.dim);
    take(j, "boundary", r.boundary), take(j, "coeff", r.coeff), take(j, "c", r.c), take(j, "t", r.t);
    take(j, "tol", r.tol), take(j, "quad_nodes", r.quad_nodes), take(j, "beta", r.beta);
    take(j, "a", r.a), take(j, "b", r.b), take(j, "norm", r.norm), take(j, "bound", r.bound);
    take(j, "m", r.m), take(j, "dxs", r.dxs), take(j, "t_min", r.t_min), take(j, "t_max", r.t_max);
    take(j, "per_decade", r.per_decade), take(j, "x_halfwidth", r.x_halfwidth);
    take(j, "alpha_max", r.alpha_max), take(j, "psi", r.psi), take(j, "source", r.source);
    take(j, "potential", r.potential), take(j, "times", r.times), take(j, "out", r.out);
    take(j, "meta", r.meta), take(j, "suite", r.suite), take(j, "seed", r.seed), take(j, "threads", r.threads);
}

struct Failure {
    int code;
    std::string what;
};

void check(sdh_status s) {
    if (s != SDH_OK) throw Failure{s == SDH_ERR_CONVERGENCE ? 3 : s == SDH_ERR_ARGUMENT ? 2 : 1, sdh_last_error()};
}

void arg_fail(const std::string& what) { throw Failure{2, what}; }

// text to stdout for "-", otherwise temp file then rename
void emit(const std::string& path, const std::string& text) {
    if (path == "-" || path.empty()) {
        std::cout << text;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw Failure{1, "cannot write " + path};
        os << text;
        if (!os) throw Failure{1, "cannot write " + path};
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Failure{1, "cannot rename onto " + path};
    }
}

void emit_field(const std::string& path, const sdh_field* f) {
    if (path != "-" && !path.empty()) {
        check(sdh_field_write_csv(f, path.c_str()));
        return;
    }
    char* text = nullptr;
    check(sdh_field_to_csv(f, &text));
    std::cout << text;
    sdh_free_string(text);
}

struct Grid {
    sdh_grid* g = nullptr;
    ~Grid() { sdh_grid_destroy(g); }
};
struct Coeffs {
    sdh_coeffs* c = nullptr;
    ~Coeffs() { sdh_coeffs_destroy(c); }
};
struct FieldH {
    sdh_field* f = nullptr;
    ~FieldH() { sdh_field_destroy(f); }
};

int periodic_flag(const RunConfig& r) {
    if (r.boundary == "periodic") return 1;
    if (r.boundary == "zero") return 0;
    arg_fail("boundary must be periodic or zero");
    return 0;
}

void make_grid(const RunConfig& r, Grid& g) {
    check(sdh_grid_create(r.dx, r.dim, r.radius, periodic_flag(r), &g.g));
}

std::vector<int> beta_of(const RunConfig& r) {
    if (r.beta.empty()) return std::vector<int>(r.dim, 0);
    if (static_cast<int>(r.beta.size()) != r.dim) arg_fail("--beta needs one index per direction");
    return r.beta;
}

std::string path_or(const std::string& p, const std::string& fallback) { return p.empty() ? fallback : p; }

int run_kernel(const RunConfig& r) {
    Grid g;
    make_grid(r, g);
    std::vector<double> c = r.c;
    if (c.size() == 1) c.assign(r.dim, c[0]);
    if (static_cast<int>(c.size()) != r.dim) arg_fail("--c needs 1 or dim values");
    FieldH f;
    check(sdh_kernel(g.g, c.data(), r.t, &f.f));
    emit_field(r.out, f.f);
    return 0;
}

int run_gamma(const RunConfig& r, bool oracle) {
    Grid g;
    make_grid(r, g);
    Coeffs c;
    check(sdh_coeffs_parse(g.g, r.coeff.c_str(), &c.c));
    const auto beta = beta_of(r);
    FieldH f;
    json meta;
    if (oracle) {
        check(sdh_oracle(c.c, beta.data(), r.t, r.tol, &f.f));
        meta = {{"method", "oracle"}, {"tol", r.tol}};
    } else {
        sdh_gamma_info info{};
        check(sdh_gamma(c.c, beta.data(), r.t, r.quad_nodes, r.tol, &info, &f.f));
        meta = {{"m_max", info.m_max}, {"fitted_C3", info.fitted_C3}, {"fitted_C", info.fitted_C},
                {"quad_nodes", info.quad_nodes}, {"tail_estimate", info.tail_estimate}};
    }
    meta["config"] = to_json(r);
    emit_field(r.out, f.f);
    const bool to_file = r.out != "-" && !r.out.empty();
    if (!r.meta.empty() || to_file) emit(path_or(r.meta, r.out + ".json"), meta.dump(2) + "\n");
    return 0;
}

int run_compare(const RunConfig& r) {
    if (r.a.empty() || r.b.empty()) arg_fail("compare needs --a and --b");
    const int per = periodic_flag(r);
    FieldH a, b;
    check(sdh_field_read_csv(r.a.c_str(), r.dx, per, &a.f));
    check(sdh_field_read_csv(r.b.c_str(), r.dx, per, &b.f));
    double l1 = 0, l2 = 0, linf = 0;
    check(sdh_compare(a.f, b.f, &l1, &l2, &linf));
    json j = {{"l1", l1}, {"l2", l2}, {"linf", linf}, {"norm", r.norm}};
    if (r.norm == "l1") j["value"] = l1;
    else if (r.norm == "l2") j["value"] = l2;
    else if (r.norm == "linf") j["value"] = linf;
    else arg_fail("--norm must be l1, l2 or linf");
    emit(r.out, j.dump(2) + "\n");
    return 0;
}

int run_bound_check(const RunConfig& r) {
    json cfg = {{"bound", r.bound}, {"dim", r.dim}, {"m", r.m}, {"c", r.c.empty() ? 1.0 : r.c[0]},
                {"dxs", r.dxs}, {"t_min", r.t_min}, {"t_max", r.t_max}, {"per_decade", r.per_decade},
                {"x_halfwidth", r.x_halfwidth}, {"alpha_max", r.alpha_max}};
    char* out = nullptr;
    check(sdh_bound_check(cfg.dump().c_str(), &out));
    json rep = json::parse(out);
    sdh_free_string(out);
    rep["config"] = to_json(r);
    emit(r.out, rep.dump(2) + "\n");
    return 0;
}

int run_solve(const RunConfig& r) {
    Grid g;
    make_grid(r, g);
    Coeffs c;
    check(sdh_coeffs_parse(g.g, r.coeff.c_str(), &c.c));
    FieldH psi, src, pot;
    check(sdh_field_parse(g.g, r.psi.c_str(), &psi.f));
    if (!r.source.empty()) check(sdh_field_parse(g.g, r.source.c_str(), &src.f));
    if (!r.potential.empty()) check(sdh_field_parse(g.g, r.potential.c_str(), &pot.f));
    std::vector<double> times = r.times.empty() ? std::vector<double>{r.t} : r.times;
    std::vector<sdh_field*> out(times.size(), nullptr);
    sdh_solve_report rep{};
    const sdh_status s = sdh_solve(c.c, psi.f, src.f, pot.f, times.data(), static_cast<int>(times.size()),
                                   r.quad_nodes, r.tol, &rep, out.data());
    std::vector<FieldH> owned(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) owned[i].f = out[i];
    check(s);
    const std::string prefix = r.out == "-" || r.out.empty() ? "solution" : r.out;
    json slices = json::array();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::string path = prefix + "_t" + std::to_string(i) + ".csv";
        emit_field(path, out[i]);
        slices.push_back({{"t", times[i]}, {"path", path}});
    }
    json j = {{"panels", rep.panels}, {"picard_iters", rep.picard_iters}, {"halvings", rep.halvings},
              {"fixed_point_residual", rep.fixed_point_residual}, {"m_max", rep.m_max},
              {"seed_columns", rep.seed_columns}};
    j["residual"] = std::isnan(rep.residual) ? json(nullptr) : json(rep.residual);
    j["slices"] = slices;
    j["config"] = to_json(r);
    emit(path_or(r.meta, prefix + ".json"), j.dump(2) + "\n");
    return 0;
}

int run_verify(const RunConfig& r) {
    std::vector<std::string> suites;
    if (r.suite == "all") {
        for (int i = 0; i < sdh_suite_count(); ++i) suites.push_back(sdh_suite_name(i));
    } else {
        suites.push_back(r.suite);
    }
    json all = json::array();
    bool ok = true;
    for (const auto& s : suites) {
        char* out = nullptr;
        int pass = 0;
        check(sdh_verify(s.c_str(), r.seed, &pass, &out));
        all.push_back(json::parse(out));
        sdh_free_string(out);
        ok = ok && pass;
    }
    emit(r.out, (suites.size() == 1 ? all[0] : all).dump(2) + "\n");
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig r;
    // a --config file supplies defaults; explicit flags override it
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--config") continue;
        std::ifstream is(argv[i + 1]);
        try {
            if (!is) throw std::runtime_error("cannot open");
            from_json(json::parse(is), r);
        } catch (const std::exception& e) {
            std::cerr << "error: bad --config " << argv[i + 1] << ": " << e.what() << "\n";
            return 2;
        }
    }

    CLI::App app{"Semi-discrete heat kernels: parametrix, oracle, bounds and solvers"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    bool dump = false;
    app.add_option("--config", config_path, "JSON run config (as written by --dump-config)");
    app.add_flag("--dump-config", dump, "print the resolved config as JSON and exit");
    app.add_option("--threads", r.threads, "worker thread cap (overrides SDHEAT_THREADS)");
    app.add_option("--seed", r.seed, "seed for randomised suites");

    auto grid_opts = [&](CLI::App* s) {
        s->add_option("--dx", r.dx, "lattice spacing");
        s->add_option("--radius", r.radius, "box half-width in sites");
        s->add_option("--dim", r.dim, "dimension");
        s->add_option("--boundary", r.boundary, "periodic or zero")->check(CLI::IsMember({"periodic", "zero"}));
    };
    auto out_opt = [&](CLI::App* s, const char* help) { s->add_option("-o,--out", r.out, help); };

    auto* kernel = app.add_subcommand("kernel", "constant-coefficient kernel slice as CSV");
    grid_opts(kernel);
    kernel->add_option("--c", r.c, "coefficients c^1..c^d (one value is broadcast)")->delimiter(',');
    kernel->add_option("--t,--time", r.t, "time");
    out_opt(kernel, "CSV path or - for stdout");

    auto gamma_like = [&](CLI::App* s, bool quad) {
        grid_opts(s);
        s->add_option("--coeff", r.coeff, "const:v, sine:a,b,k or CSV path");
        s->add_option("--t,--time", r.t, "time");
        s->add_option("--tol", r.tol, "tolerance");
        if (quad) s->add_option("--quad-nodes", r.quad_nodes, "time quadrature nodes");
        s->add_option("--beta", r.beta, "source site")->delimiter(',');
        out_opt(s, "CSV path or - for stdout");
        s->add_option("--meta", r.meta, "JSON sidecar path (default <out>.json)");
    };
    auto* gamma = app.add_subcommand("gamma", "fundamental solution column by the parametrix");
    gamma_like(gamma, true);
    auto* oracle = app.add_subcommand("oracle", "fundamental solution column from the matrix exponential");
    gamma_like(oracle, false);

    auto* compare = app.add_subcommand("compare", "distance between two field CSVs");
    compare->add_option("--a", r.a, "first CSV");
    compare->add_option("--b", r.b, "second CSV");
    compare->add_option("--norm", r.norm, "l1, l2 or linf")->check(CLI::IsMember({"l1", "l2", "linf"}));
    compare->add_option("--dx", r.dx, "lattice spacing for the weighted norms");
    compare->add_option("--boundary", r.boundary, "periodic or zero")->check(CLI::IsMember({"periodic", "zero"}));
    out_opt(compare, "JSON path or - for stdout");

    auto* bound = app.add_subcommand("bound-check", "empirical constant of an estimate");
    bound->add_option("--bound", r.bound, "lorentz, gaussian, pang or prop53");
    bound->add_option("--dim", r.dim, "dimension");
    bound->add_option("--m", r.m, "difference order (lorentz)");
    bound->add_option("--c", r.c, "isotropic coefficient")->delimiter(',');
    bound->add_option("--dx", r.dxs, "grid spacings")->delimiter(',');
    bound->add_option("--t-min", r.t_min, "smallest sampled time");
    bound->add_option("--t-max", r.t_max, "largest sampled time");
    bound->add_option("--per-decade", r.per_decade, "time samples per decade");
    bound->add_option("--x-halfwidth", r.x_halfwidth, "sampled |alpha dx| (lorentz, prop53)");
    bound->add_option("--alpha-max", r.alpha_max, "sampled |alpha^j| (gaussian) or |n| (pang)");
    out_opt(bound, "JSON path or - for stdout");

    auto* solve = app.add_subcommand("solve", "Cauchy problem with source and potential");
    grid_opts(solve);
    solve->add_option("--coeff", r.coeff, "const:v, sine:a,b,k or CSV path");
    solve->add_option("--psi", r.psi, "initial data: expression or CSV path");
    solve->add_option("--source", r.source, "time-constant source: expression or CSV path");
    solve->add_option("--potential", r.potential, "potential Y >= 0: expression or CSV path");
    solve->add_option("--t,--time", r.t, "final time (when --times is absent)");
    solve->add_option("--times", r.times, "output times")->delimiter(',');
    solve->add_option("--tol", r.tol, "tolerance");
    solve->add_option("--quad-nodes", r.quad_nodes, "time quadrature nodes");
    solve->add_option("-o,--out", r.out, "output prefix: <prefix>_t<k>.csv and <prefix>.json");
    solve->add_option("--meta", r.meta, "report path (default <prefix>.json)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", r.suite, "suite name or all")->required();
    out_opt(verify, "JSON path or - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    r.subcommand = sub->get_name();
    if (dump) {
        std::cout << to_json(r).dump(2) << "\n";
        return 0;
    }
    sdh_set_threads(r.threads);
    try {
        if (sub == kernel) return run_kernel(r);
        if (sub == gamma) return run_gamma(r, false);
        if (sub == oracle) return run_gamma(r, true);
        if (sub == compare) return run_compare(r);
        if (sub == bound) return run_bound_check(r);
        if (sub == solve) return run_solve(r);
        return run_verify(r);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.what << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
