#include <doctest.h>

#include <cmath>
#include <set>

#include "sdheat/errors.hpp"
#include "sdheat/verify.hpp"

using namespace sdheat;

TEST_CASE("suite registry") {
    const auto& names = suite_names();
    CHECK(names.size() == 12);
    std::set<std::string> crit;
    for (const auto& n : names) {
        crit.insert(suite_criterion(n));
        CHECK(suite_budget(n) > 0);
    }
    CHECK(crit.size() == 12);
    CHECK(suite_criterion("mass") == "AC-1");
    CHECK(suite_criterion("pang") == "AC-12");
    CHECK_THROWS_AS(run_suite("bogus"), ArgumentError);
    CHECK_THROWS_AS(suite_criterion("bogus"), ArgumentError);
}

TEST_CASE("report schema and determinism") {
    const SuiteReport a = run_suite("mass"), b = run_suite("mass");
    const auto j = a.to_json();
    for (const char* key : {"suite", "pass", "metrics", "config_echo"}) CHECK(j.contains(key));
    CHECK(j["suite"] == "mass");
    CHECK(j["config_echo"]["seed"] == 1);
    CHECK(a.pass);
    CHECK(j.dump() == b.to_json().dump());

    VerifyOptions o;
    o.seed = 7;
    CHECK(run_suite("mass", o).to_json()["config_echo"]["seed"] == 7);
}

TEST_CASE("cheap suites") {
    SUBCASE("bessel cross-check") {
        const auto r = run_suite("bessel-cross");
        CHECK(r.pass);
        CHECK(r.metrics["max_rel_error"].get<double>() <= 1e-10);
    }
    SUBCASE("convolution of Lorentzians") {
        const auto r = run_suite("lorentz-conv");
        CHECK(r.pass);
        CHECK(r.metrics["max_bound_ratio"].get<double>() <= std::sqrt(2.0));
    }
}

TEST_CASE("off-diagonal estimate keeps a constant below one") {
    const auto r = run_suite("pang");
    const double C = r.metrics["fitted_C"].get<double>();
    // sup ratio approaches 1/sqrt(2 pi) at large t, so the suite fails honestly
    CHECK(C == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(0.01));
    CHECK_FALSE(r.pass);
    CHECK(r.metrics["origin_probe_rejected"].get<bool>());
    CHECK(r.metrics["density_change"].get<double>() < 0.20);
}

TEST_CASE("bound_check sweeps") {
    BoundCheckConfig cfg;
    cfg.per_decade = 5;
    cfg.t_min = 1e-2;
    SUBCASE("zeroth-order kernel bound is dx independent") {
        // each dx must see the same range of t / dx^2
        cfg.t_min = 1e-6;
        const auto rep = bound_check(cfg);
        CHECK(rep.per_dx.size() == 3);
        CHECK(std::isfinite(rep.sup_ratio));
        CHECK(rep.spread() < 0.10);
        CHECK(rep.samples > 0);
    }
    SUBCASE("first differences degrade as t shrinks") {
        cfg.m = 1;
        cfg.t_min = 1e-5;
        const auto rep = bound_check(cfg);
        CHECK(rep.spread() > 0.10);
        CHECK(rep.argmax_t == doctest::Approx(1e-5));
    }
    SUBCASE("gaussian stays below one") {
        cfg.bound = "gaussian";
        cfg.dxs = {1.0, 0.25};
        cfg.alpha_max = 16;
        const auto rep = bound_check(cfg);
        CHECK(rep.sup_ratio <= 1.0 + 1e-12);
    }
    SUBCASE("bad configurations") {
        cfg.bound = "nope";
        CHECK_THROWS_AS(bound_check(cfg), ArgumentError);
        cfg.bound = "lorentz";
        cfg.m = 3;
        CHECK_THROWS_AS(bound_check(cfg), ArgumentError);
        cfg.m = 0;
        cfg.t_min = -1;
        CHECK_THROWS_AS(bound_check(cfg), ArgumentError);
        cfg.t_min = 1e-3;
        cfg.dxs.clear();
        CHECK_THROWS_AS(bound_check(cfg), ArgumentError);
    }
}
