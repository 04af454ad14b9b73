#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdheat/sdheat.h"

namespace {

struct Grid {
    sdh_grid* g = nullptr;
    Grid(double dx, int dim, int radius, int periodic = 1) {
        REQUIRE(sdh_grid_create(dx, dim, radius, periodic, &g) == SDH_OK);
    }
    ~Grid() { sdh_grid_destroy(g); }
};

std::string take(char* s) {
    std::string out = s ? s : "";
    sdh_free_string(s);
    return out;
}

}  // namespace

TEST_CASE("grid handles and error reporting") {
    Grid g(0.5, 1, 8);
    CHECK(sdh_grid_sites(g.g) == 17);
    CHECK(sdh_grid_dim(g.g) == 1);
    CHECK(std::string(sdh_version()) == "1.0.0");

    sdh_grid* bad = nullptr;
    CHECK(sdh_grid_create(-1.0, 1, 8, 1, &bad) == SDH_ERR_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(std::string(sdh_last_error()).size() > 0);
    CHECK(sdh_grid_create(1.0, 1, 8, 1, nullptr) == SDH_ERR_ARGUMENT);
    // success clears the message
    sdh_grid* ok = nullptr;
    CHECK(sdh_grid_create(1.0, 2, 2, 0, &ok) == SDH_OK);
    CHECK(std::string(sdh_last_error()).empty());
    CHECK(sdh_grid_sites(ok) == 25);
    sdh_grid_destroy(ok);
    sdh_grid_destroy(nullptr);
}

TEST_CASE("kernel column") {
    Grid g(1.0, 1, 20);
    const double c = 1.0;
    sdh_field* k = nullptr;
    REQUIRE(sdh_kernel(g.g, &c, 0.5, &k) == SDH_OK);
    CHECK(sdh_field_size(k) == 41);
    CHECK(sdh_field_radius(k) == 20);
    CHECK(sdh_field_dx(k) == 1.0);
    const double* v = sdh_field_data(k);
    CHECK(v[20] == doctest::Approx(std::exp(-1.0) * 1.2660658777520082).epsilon(1e-14));
    double mass = 0;
    for (size_t i = 0; i < sdh_field_size(k); ++i) mass += v[i];
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sdh_kernel(g.g, &c, -1.0, &k) == SDH_ERR_ARGUMENT);
    sdh_field_destroy(k);
}

TEST_CASE("parametrix, oracle and compare") {
    Grid g(0.125, 1, 32);
    sdh_coeffs* co = nullptr;
    REQUIRE(sdh_coeffs_parse(g.g, "sine:1,0.5,1", &co) == SDH_OK);
    const int beta = 0;
    sdh_gamma_info info{};
    sdh_field *gam = nullptr, *orc = nullptr;
    REQUIRE(sdh_gamma(co, &beta, 0.25, 96, 1e-8, &info, &gam) == SDH_OK);
    REQUIRE(sdh_oracle(co, &beta, 0.25, 1e-12, &orc) == SDH_OK);
    CHECK(info.m_max >= 1);
    CHECK(info.quad_nodes == 96);
    double l1, l2, linf;
    REQUIRE(sdh_compare(gam, orc, &l1, &l2, &linf) == SDH_OK);
    CHECK(l1 < 1e-6);
    CHECK(linf < 1e-6);
    REQUIRE(sdh_compare(orc, orc, &l1, &l2, &linf) == SDH_OK);
    CHECK(l1 == 0.0);
    CHECK(l2 == 0.0);
    CHECK(linf == 0.0);

    // unreachable tolerance is a convergence failure, not an argument error
    sdh_field* none = nullptr;
    CHECK(sdh_gamma(co, &beta, 0.25, 96, 1e-17, nullptr, &none) == SDH_ERR_CONVERGENCE);
    CHECK(none == nullptr);

    Grid other(0.25, 1, 16);
    sdh_field* k = nullptr;
    const double c = 1.0;
    REQUIRE(sdh_kernel(other.g, &c, 0.1, &k) == SDH_OK);
    CHECK(sdh_compare(gam, k, &l1, &l2, &linf) == SDH_ERR_ARGUMENT);

    CHECK(sdh_coeffs_parse(g.g, "sine:1,2,1", &co) == SDH_ERR_ARGUMENT);  // not elliptic
    sdh_field_destroy(k);
    sdh_field_destroy(gam);
    sdh_field_destroy(orc);
    sdh_coeffs_destroy(co);
}

TEST_CASE("field parse and CSV round trip") {
    Grid g(0.25, 1, 8);
    sdh_field* f = nullptr;
    REQUIRE(sdh_field_parse(g.g, "gauss:1", &f) == SDH_OK);
    const std::string path = "capi_roundtrip.csv";
    REQUIRE(sdh_field_write_csv(f, path.c_str()) == SDH_OK);
    sdh_field* back = nullptr;
    REQUIRE(sdh_field_read_csv(path.c_str(), 0.25, 1, &back) == SDH_OK);
    double l1, l2, linf;
    REQUIRE(sdh_compare(f, back, &l1, &l2, &linf) == SDH_OK);
    CHECK(linf == 0.0);
    char* text = nullptr;
    REQUIRE(sdh_field_to_csv(f, &text) == SDH_OK);
    CHECK(take(text).find("\n0,1\n") != std::string::npos);
    std::remove(path.c_str());

    CHECK(sdh_field_read_csv("does/not/exist.csv", 0.25, 1, &back) == SDH_ERR_IO);
    CHECK(sdh_field_parse(g.g, "gauss:-1", &f) == SDH_ERR_ARGUMENT);
    sdh_field_destroy(f);
    sdh_field_destroy(back);
}

TEST_CASE("solve with and without a potential") {
    Grid g(0.25, 1, 16);
    sdh_coeffs* co = nullptr;
    REQUIRE(sdh_coeffs_parse(g.g, "const:1", &co) == SDH_OK);
    sdh_field *psi = nullptr, *Y = nullptr;
    REQUIRE(sdh_field_parse(g.g, "const:1", &psi) == SDH_OK);
    REQUIRE(sdh_field_parse(g.g, "const:2", &Y) == SDH_OK);
    const double times[4] = {0.25, 0.5, 0.75, 1.0};
    sdh_field* out[4] = {};
    sdh_solve_report rep{};
    REQUIRE(sdh_solve(co, psi, nullptr, Y, times, 4, 96, 1e-10, &rep, out) == SDH_OK);
    for (int k = 0; k < 4; ++k) {
        CHECK(sdh_field_data(out[k])[3] == doctest::Approx(std::exp(-2.0 * times[k])).epsilon(1e-8));
        sdh_field_destroy(out[k]);
    }
    CHECK(rep.panels >= 4);
    CHECK(std::isfinite(rep.residual));

    REQUIRE(sdh_solve(co, psi, nullptr, nullptr, times, 2, 96, 1e-10, &rep, out) == SDH_OK);
    CHECK(std::isnan(rep.residual));
    CHECK(sdh_field_data(out[1])[0] == doctest::Approx(1.0).epsilon(1e-9));
    sdh_field_destroy(out[0]);
    sdh_field_destroy(out[1]);

    const double backwards[2] = {0.5, 0.25};
    CHECK(sdh_solve(co, psi, nullptr, nullptr, backwards, 2, 96, 1e-10, &rep, out) == SDH_ERR_ARGUMENT);
    sdh_field_destroy(psi);
    sdh_field_destroy(Y);
    sdh_coeffs_destroy(co);
}

TEST_CASE("bound check and verify through JSON") {
    char* out = nullptr;
    REQUIRE(sdh_bound_check(R"({"bound":"lorentz","m":0,"per_decade":4,"dxs":[0.5,0.25]})", &out) == SDH_OK);
    const auto j = nlohmann::json::parse(take(out));
    CHECK(j["bound_id"] == "lorentz_m0");
    CHECK(j["per_dx"].size() == 2);
    CHECK(j["sup_ratio"].get<double>() > 0);
    CHECK(sdh_bound_check("{not json", &out) == SDH_ERR_ARGUMENT);
    CHECK(sdh_bound_check(R"({"bound":"lorentz","frobnicate":1})", &out) == SDH_ERR_ARGUMENT);

    CHECK(sdh_suite_count() == 12);
    CHECK(std::string(sdh_suite_name(0)) == "mass");
    CHECK(sdh_suite_name(12) == nullptr);
    int pass = -1;
    REQUIRE(sdh_verify("mass", 1, &pass, &out) == SDH_OK);
    CHECK(pass == 1);
    CHECK(nlohmann::json::parse(take(out))["suite"] == "mass");
    CHECK(sdh_verify("bogus", 1, &pass, &out) == SDH_ERR_ARGUMENT);
}
