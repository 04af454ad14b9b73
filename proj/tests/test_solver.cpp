#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sdheat/oracle.hpp"
#include "sdheat/solver.hpp"

using namespace sdheat;

namespace {

Coefficients sine_coeffs(double dx, int radius) {
    return Coefficients::sine(GridSpec(dx, 1, radius), 1.0, 0.5, 1.0);
}

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

TimeQuadrature quad_nodes(int n) {
    TimeQuadrature q;
    q.nodes = n;
    return q;
}

// lowest torus mode, smooth on the periodic box
Field mode(const GridSpec& g, double phase) {
    const double ell = g.side() * g.dx;
    return Field::from_function(g, [&](const MultiIndex& a) {
        return std::cos(2 * std::numbers::pi * a[0] * g.dx / ell + phase);
    });
}

}  // namespace

TEST_CASE("homogeneous problems") {
    auto c = sine_coeffs(0.125, 16);
    const GridSpec& g = c.grid;
    CauchyProblem p{c, Field::dirac(g, {3}), nullptr, std::nullopt, 0.3};
    Field u = solve_inhomogeneous(p, 0.3, quad_nodes(32), 1e-8);
    CHECK(sup_diff(u, gamma(c, {3}, 0.3, quad_nodes(32), 1e-8)) <= 1e-12);

    p.psi = Field(g, 1.0);
    Field one = solve_inhomogeneous(p, 0.3, quad_nodes(32), 1e-8);
    for (double x : one.values()) CHECK(std::abs(x - 1.0) <= 1e-6);

    auto out = solve_inhomogeneous(p, std::vector<double>{0.0, 0.1}, quad_nodes(32), 1e-8);
    CHECK(out.size() == 2);
    CHECK(sup_diff(out[0], p.psi) == 0.0);
}

TEST_CASE("constant and smooth sources") {
    auto c = sine_coeffs(0.125, 16);
    const GridSpec& g = c.grid;
    Field one(g, 1.0);
    CauchyProblem p{c, Field(g), [&](double) { return one; }, std::nullopt, 0.4};
    SolveReport rep;
    Field u = solve_inhomogeneous(p, 0.4, quad_nodes(32), 1e-8, &rep);
    CHECK(rep.seed_columns == 2);
    for (double x : u.values()) CHECK(std::abs(x - 0.4) <= 1e-6);

    // against the oracle with the affine exponential
    Field psi = mode(g, 0.0), f = mode(g, 1.0);
    CauchyProblem q{c, psi, [&](double) { return f; }, std::nullopt, 0.25};
    Field w = solve_inhomogeneous(q, 0.25, quad_nodes(32), 1e-8);
    Field o = expm_apply(Generator(c), 0.25, psi, 1e-12, &f);
    CHECK(sup_diff(w, o) <= 1e-6);

    // centred-difference residual at spacing 1e-3
    std::vector<double> t{0.199, 0.2, 0.201};
    auto slices = solve_inhomogeneous(q, t, quad_nodes(32), 1e-8);
    CHECK(residual(slices, Generator(c), [&](double) { return f; }, t) <= 1e-4 * 2);
}

TEST_CASE("time-dependent source through the full kernel") {
    // more distinct source slices than sites: the solver seeds the identity
    GridSpec g(0.25, 1, 6);
    auto c = Coefficients::constant(g, 0.9);
    Field base = mode(g, 0.5);
    Source f = [&](double s) {
        Field v = base;
        for (auto& x : v.values()) x *= std::sin(3.0 * s);
        return v;
    };
    CauchyProblem p{c, mode(g, 0.0), f, std::nullopt, 0.5};
    SolveReport rep;
    Field u = solve_inhomogeneous(p, 0.5, quad_nodes(32), 1e-10, &rep);
    CHECK(rep.seed_columns == 13);
    Field ref = duhamel_const(p.psi, f, 0.5, ConstCoeffs({0.9}), 64);
    CHECK(sup_diff(u, ref) <= 1e-9);
}

TEST_CASE("potential solver") {
    GridSpec g(0.125, 1, 8);
    auto flat = Coefficients::constant(g, 1.0);
    for (double lambda : {0.5, 4.0}) {
        CauchyProblem p{flat, Field(g, 1.0), nullptr, Field(g, lambda), 1.0};
        SolveReport rep;
        auto u = solve_with_potential(p, 1.0, 4, quad_nodes(32), 1e-12, 50, &rep);
        REQUIRE(u.size() == 4);
        for (int k = 0; k < 4; ++k)
            for (double x : u[k].values()) CHECK(std::abs(x - std::exp(-lambda * 0.25 * (k + 1))) <= 1e-8);
        CHECK(rep.panels >= static_cast<int>(std::ceil(2 * lambda)));
        CHECK(rep.fixed_point_residual <= 1e-12);
    }

    auto c = sine_coeffs(0.125, 16);
    const GridSpec& gs = c.grid;
    Field psi = Field::from_function(gs, [&](const MultiIndex& a) {
        const double x = a[0] * gs.dx;
        return std::exp(-x * x);
    });
    Field f = Field::from_function(gs, [&](const MultiIndex& a) { return 1.0 + mode(gs, 0.3)[gs.flat(a)]; });
    Field Y = Field::from_function(gs, [&](const MultiIndex& a) { return 1.5 + mode(gs, 1.1)[gs.flat(a)]; });

    // no potential: same as the plain Duhamel solver
    CauchyProblem p0{c, psi, [&](double) { return f; }, Field(gs, 0.0), 0.25};
    CauchyProblem p0n{c, psi, [&](double) { return f; }, std::nullopt, 0.25};
    CHECK(sup_diff(solve_with_potential(p0, 0.25, quad_nodes(32), 1e-8),
                   solve_inhomogeneous(p0n, 0.25, quad_nodes(32), 1e-8)) <= 1e-7);

    CauchyProblem p{c, psi, [&](double) { return f; }, Y, 0.25};
    Field u = solve_with_potential(p, 0.25, quad_nodes(32), 1e-8);
    Field o = expm_apply(Generator(c, Y), 0.25, psi, 1e-12, &f);
    CHECK(sup_diff(u, o) <= 5e-3);
    CHECK(sup_diff(u, o) <= 1e-5);
    for (double x : u.values()) CHECK(x >= -1e-10);

    CHECK_THROWS_AS(solve_with_potential(p, 0.25, quad_nodes(32), 1e-10, 4), ArgumentError);
    CHECK_THROWS_AS(solve_inhomogeneous(p, 0.25, quad_nodes(32), 1e-10), ArgumentError);
    CauchyProblem neg{c, psi, nullptr, Field(gs, -1.0), 0.25};
    CHECK_THROWS_AS(solve_with_potential(neg, 0.25, quad_nodes(32), 1e-10), ArgumentError);
}

TEST_CASE("Picard report on a stiff potential") {
    GridSpec g(0.25, 1, 3);
    auto c = Coefficients::constant(g, 1.0);
    Field Y = Field::from_function(g, [](const MultiIndex& a) { return 20.0 + 5.0 * a[0]; });
    CauchyProblem p{c, Field(g, 1.0), nullptr, Y, 0.5};
    SolveReport rep;
    Field u = solve_with_potential(p, 0.5, quad_nodes(16), 1e-12, 8, &rep);
    Field o = expm_apply(Generator(c, Y), 0.5, Field(g, 1.0), 1e-13);
    CHECK(sup_diff(u, o) <= 1e-9);
    // eight sweeps are too few at the initial panel width
    CHECK(rep.halvings >= 1);
    CHECK(rep.halvings <= 6);
    CHECK(rep.panels >= 35);
    CHECK(rep.picard_iters <= 8 * rep.panels);
}

TEST_CASE("gradient sup") {
    GridSpec g(0.25, 1, 8);
    CHECK(gradient_sup(Field(g, 3.0)) == 0.0);
    Field tent = Field::from_function(g, [&](const MultiIndex& a) { return std::abs(a[0]) * g.dx; });
    CHECK(gradient_sup(tent) == doctest::Approx(1.0));
    GridSpec g2(0.5, 2, 4);
    Field plane = Field::from_function(g2, [&](const MultiIndex& a) { return 2.0 * std::abs(a[1]) * g2.dx; });
    CHECK(gradient_sup(plane) == doctest::Approx(2.0));
}
