#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "gradstorm/errors.hpp"
#include "gradstorm/quadrature.hpp"

using namespace gradstorm;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("polynomials are integrated exactly on one segment") {
    // GK21 is exact to degree 31.
    std::vector<double> br = {-1.0, 2.0};
    const double v = quad::integrate_scalar([](double x) { return std::pow(x, 9) - 3.0 * x * x; }, br);
    const double exact = (std::pow(2.0, 10) - 1.0) / 10.0 - (8.0 + 1.0);
    CHECK(v == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("gaussian over the whole line") {
    auto g = [](double x) { return quad::Vec<2>{std::exp(-x * x), x * x * std::exp(-x * x)}; };
    const auto est = quad::integrate_line<2>(g, {0.0}, -inf, inf);
    CHECK(est.value[0] == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(est.value[1] == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("narrow peak far from the origin needs its breakpoints") {
    const double c = 1e4, w = 1e-3;
    auto g = [&](double x) { return quad::Vec<1>{std::exp(-0.5 * (x - c) * (x - c) / (w * w))}; };
    const auto est = quad::integrate_line<1>(g, {c - 10 * w, c, c + 10 * w}, -inf, inf);
    CHECK(est.value[0] == doctest::Approx(w * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("half line and heavy algebraic tail") {
    auto g = [](double x) { return quad::Vec<1>{1.0 / (1.0 + x * x)}; };
    const auto est = quad::integrate_line<1>(g, {1.0}, 0.0, inf);
    CHECK(est.value[0] == doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("integrable endpoint singularity") {
    std::vector<double> br = {0.0, 1.0};
    const double v = quad::integrate_scalar([](double x) { return 1.0 / std::sqrt(x); }, br);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("non-decaying tail is reported as divergent") {
    auto g = [](double) { return quad::Vec<1>{1.0}; };
    CHECK_THROWS_AS(quad::integrate_line<1>(g, {0.0}, 0.0, inf), DivergentIntegral);
    auto slow = [](double x) { return quad::Vec<1>{1.0 / (1.0 + std::abs(x))}; };
    CHECK_THROWS_AS(quad::integrate_line<1>(slow, {0.0}, -inf, inf), DivergentIntegral);
}

TEST_CASE("subdivision budget exhaustion raises NonConvergent with the error reached") {
    quad::Tolerance tol;
    tol.max_subdivisions = 3;
    std::vector<double> br = {1e-6, 1.0};
    try {
        quad::integrate_scalar([](double x) { return std::sin(1.0 / x); }, br, tol);
        FAIL("expected NonConvergent");
    } catch (const NonConvergent& e) {
        CHECK(e.achieved_tolerance() > 0.0);
        CHECK(e.kind() == ErrorKind::NonConvergent);
    }
}

TEST_CASE("components share abscissae and each meets its own tolerance") {
    // A tiny component next to a large one: relative tolerance is per component.
    auto g = [](double x) { return quad::Vec<2>{std::exp(-x * x), 1e-20 * std::exp(-x * x) * std::cos(x)}; };
    const auto est = quad::integrate_line<2>(g, {0.0}, -inf, inf, {0.0, 1e-10, 20000, 240});
    CHECK(est.value[1] == doctest::Approx(1e-20 * std::sqrt(std::numbers::pi) * std::exp(-0.25)).epsilon(1e-9));
}
