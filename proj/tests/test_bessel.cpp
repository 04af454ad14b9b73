#include <doctest.h>

#include <cmath>
#include <limits>

#include "sdheat/bessel.hpp"
#include "sdheat/errors.hpp"

using namespace sdheat;

namespace {

// independent oracle: I_n(r) power series in long double
long double series_ld(int n, long double r, int terms) {
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k) term *= (r / 2) / k;
    long double sum = term;
    for (int k = 1; k <= terms; ++k) {
        term *= (r * r / 4) / (static_cast<long double>(k) * (k + n));
        sum += term;
    }
    return sum * std::exp(-r);
}

}  // namespace

TEST_CASE("special values") {
    CHECK(iv_scaled(0, 0.0) == 1.0);
    CHECK(iv_scaled(3, 0.0) == 0.0);
    CHECK(iv_scaled_quadrature(0, 0.0) == 1.0);
    CHECK(iv_scaled_quadrature(1, 0.0) == 0.0);
    const double ref = static_cast<double>(series_ld(0, 1.0L, 40));
    CHECK(std::abs(iv_scaled(0, 1.0) - ref) <= 1e-15);
    CHECK(ref == doctest::Approx(0.46575960759364).epsilon(1e-13));
    CHECK(std::abs(iv_scaled_quadrature(0, 1.0) - iv_scaled(0, 1.0)) <= 1e-10);
    CHECK(iv_scaled(5, 2.0) == iv_scaled(-5, 2.0));
}

TEST_CASE("argument errors") {
    CHECK_THROWS_AS(iv_scaled(0, -1.0), ArgumentError);
    CHECK_THROWS_AS(iv_scaled(0, std::numeric_limits<double>::infinity()), ArgumentError);
    CHECK_THROWS_AS(iv_scaled(0, std::nan("")), ArgumentError);
    CHECK_THROWS_AS(iv_scaled_quadrature(0, -1.0), ArgumentError);
}

TEST_CASE("series oracle over the series regime") {
    for (int n : {0, 1, 2, 7, 20}) {
        for (double r : {1e-3, 0.5, 3.0, 12.0, 29.0}) {
            const long double ref = series_ld(n, r, 200);
            CHECK(std::abs(iv_scaled(n, r) - static_cast<double>(ref)) <= 1e-13 * static_cast<double>(ref));
        }
    }
}

TEST_CASE("agreement with the quadrature representation") {
    for (int k = -3; k <= 4; ++k) {
        const double r = std::pow(10.0, k);
        for (int n = 0; n <= 60; ++n) {
            const double a = iv_scaled(n, r), b = iv_scaled_quadrature(n, r);
            INFO("n=" << n << " r=" << r);
            CHECK(std::abs(a - b) <= 1e-10 * std::max(a, 1e-300));
        }
    }
}

TEST_CASE("large argument and order") {
    for (double r : {1e5, 1e6}) {
        for (long n : {0L, 10L, 1000L}) {
            const double a = iv_scaled(n, r), b = iv_scaled_quadrature(n, r);
            CHECK(std::abs(a - b) <= 1e-10 * a);
        }
    }
    CHECK(iv_scaled(1000000, 1e6) >= 0.0);  // underflows: exponent about -4.7e5
    CHECK(iv_scaled(3000, 1e6) > 0.0);
    CHECK(iv_scaled(1000000, 1e6) <= 1.0);
}

TEST_CASE("normalisation") {
    for (double r : {1e-3, 0.1, 1.0, 5.0, 29.9, 30.0, 31.0, 50.0}) {
        const long M = static_cast<long>(std::ceil(r + 40 * std::sqrt(r + 1)));
        double s = 0.0;
        for (long n = -M; n <= M; ++n) s += iv_scaled(n, r);
        INFO("r=" << r);
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("monotone in the order and bounded by one") {
    for (double r : {1e-2, 1.0, 40.0, 1e3}) {
        for (int n = 0; n < 80; ++n) {
            const double a = iv_scaled(n, r), b = iv_scaled(n + 1, r);
            CHECK(a >= b);
            CHECK(a <= 1.0);
            CHECK(b >= 0.0);
        }
    }
}

TEST_CASE("three-term recurrence") {
    for (double r : {1e-3, 0.7, 10.0, 30.0, 200.0, 5e3}) {
        for (int n = 1; n <= 40; ++n) {
            const double lhs = iv_scaled(n - 1, r) - iv_scaled(n + 1, r);
            const double rhs = (2.0 * n / r) * iv_scaled(n, r);
            if (rhs == 0.0) continue;
            CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
        }
    }
}

TEST_CASE("sequence matches pointwise evaluation") {
    for (double r : {1e-3, 2.0, 29.0, 45.0, 900.0}) {
        auto s = iv_scaled_sequence(70, r);
        for (int n = 0; n <= 70; ++n) {
            const double a = iv_scaled(n, r);
            CHECK(std::abs(s[n] - a) <= 1e-12 * a + 1e-300);
        }
    }
}
