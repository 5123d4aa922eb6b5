#include <doctest.h>

#include <cmath>
#include <vector>

#include "gradstorm/errors.hpp"
#include "gradstorm/fit.hpp"

using namespace gradstorm;

TEST_CASE("power law is recovered with its sign") {
    std::vector<double> x, y;
    for (int i = 1; i <= 10; ++i) {
        x.push_back(std::pow(10.0, -i / 4.0));
        y.push_back(-0.5 * std::pow(x.back(), -0.5));
    }
    const auto fit = fit_power_law(x, y);
    CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.rms_log_residual < 1e-12);
}

TEST_CASE("line fit") {
    std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
    const auto fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
}

TEST_CASE("degenerate inputs are rejected") {
    std::vector<double> x = {1.0, 1.0}, y = {2.0, 3.0};
    CHECK_THROWS_AS(fit_line(x, y), InvalidArgument);
    std::vector<double> x2 = {1.0, 2.0}, mixed = {1.0, -1.0};
    CHECK_THROWS_AS(fit_power_law(x2, mixed), InvalidArgument);
}
