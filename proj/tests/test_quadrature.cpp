#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "mbexit/errors.hpp"
#include "mbexit/quadrature.hpp"

using mbexit::integrate;

TEST_CASE("polynomials up to degree 22 are exact on one panel") {
    // A loose tolerance accepts the first panel; its Kronrod value must already be exact.
    const auto r = integrate([](double x) { return std::pow(x, 22); }, 0.0, 1.0, 1.0, 0.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 23.0).epsilon(1e-14));
    CHECK(r.panels == 1);
}

TEST_CASE("sqrt singularity at an endpoint converges adaptively") {
    const auto r = integrate([](double x) { return std::sqrt(x); }, 0.0, 4.0, 0.0, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(16.0 / 3.0).epsilon(1e-11));
}

TEST_CASE("kink located by refinement, breakpoints accepted") {
    const auto f = [](double x) { return std::fabs(x - 0.3); };
    const auto r = integrate(f, -1.0, 1.0, 1e-13, 1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-12));
    const std::array<double, 3> pts{-1.0, 0.3, 1.0};
    const auto s = integrate(f, pts, 1e-13, 1e-13);
    CHECK(s.panels == 2);
    CHECK(s.value == doctest::Approx(r.value).epsilon(1e-14));
}

TEST_CASE("gaussian mass with breakpoints") {
    const auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
    const std::array<double, 5> pts{-12.0, -1.0, 0.0, 1.0, 12.0};
    const auto r = integrate(phi, pts, 0.0, 1e-12);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fewer than two breakpoints is a configuration error") {
    const std::array<double, 1> one{0.0};
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, one, 1e-10, 1e-10), mbexit::ConfigError);
}
