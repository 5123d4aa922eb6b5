#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gradstorm/errors.hpp"
#include "gradstorm/profiles.hpp"
#include "gradstorm/quadrature.hpp"

using namespace gradstorm;

TEST_CASE("profile strings") {
    const auto lin = parse_velocity("linear:-1.5");
    CHECK(lin.is_linear());
    CHECK(*lin.linear_slope() == -1.5);
    CHECK(lin(2.0) == -3.0);
    const auto th = parse_velocity("tanh:-2");
    CHECK(th(0.5) == doctest::Approx(-2.0 * std::tanh(0.5)));
    CHECK(th.is_odd());
    CHECK(parse_velocity("cubic:-1")(2.0) == -8.0);

    CHECK(std::holds_alternative<UniformDensity>(parse_density("uniform").kind()));
    CHECK(parse_density("gaussian:2")(0.0) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)));
    CHECK(parse_density("powerlaw:-2")(1.0) == doctest::Approx(0.25));
    CHECK(parse_density("powerlaw:1e-1")(1.0) == doctest::Approx(std::pow(2.0, 0.1)));

    CHECK_THROWS_AS(parse_velocity("linear"), ConfigError);
    CHECK_THROWS_AS(parse_velocity("linear:x"), ConfigError);
    CHECK_THROWS_AS(parse_velocity("sine:1"), ConfigError);
    CHECK_THROWS_AS(parse_density("gaussian:0"), ConfigError);
    CHECK_THROWS_AS(parse_density("powerlaw"), ConfigError);
}

TEST_CASE("normalizability follows the tail") {
    CHECK(DensityProfile::gaussian(1).normalizable());
    CHECK(DensityProfile::power_law(-0.75).normalizable());
    CHECK_FALSE(DensityProfile::power_law(-0.5).normalizable());
    CHECK_FALSE(DensityProfile::power_law(0).normalizable());
    CHECK_FALSE(DensityProfile::uniform().normalizable());
}

TEST_CASE("gaussian density is normalized and log_eval is consistent") {
    const auto f = DensityProfile::gaussian(1.7);
    std::vector<double> br = {-6, -1, 0, 1, 6};
    CHECK(quad::integrate_scalar([&](double x) { return f(x); }, br) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : {-3.0, 0.0, 0.4}) CHECK(std::exp(f.log_eval(x)) == doctest::Approx(f(x)));
    const auto p = DensityProfile::power_law(-1.3);
    CHECK(std::exp(p.log_eval(2.0)) == doctest::Approx(std::pow(5.0, -1.3)));
}

TEST_CASE("noise must be strictly positive") {
    CHECK_THROWS_AS(NoiseModel(0.0), InvalidArgument);
    CHECK_THROWS_AS(NoiseModel(-1.0), InvalidArgument);
    CHECK(NoiseModel(0.3).sigma() == 0.3);
}

TEST_CASE("blowup time") {
    CHECK(blowup_time(VelocityProfile::linear(-2.0)) == 0.5);
    CHECK(std::isinf(blowup_time(VelocityProfile::linear(1.0))));
    // The default 4096-point grid does not contain 0, where -sech^2 is smallest.
    const auto v = parse_velocity("tanh:-1");
    const ProbeGrid grid;
    const double h = grid.at(2048) - grid.at(2047);
    CHECK(blowup_time(v) == doctest::Approx(std::cosh(h / 2) * std::cosh(h / 2)).epsilon(1e-12));
    CHECK(blowup_time(v, ProbeGrid{-50.0, 50.0, 4097}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("derivative check and separation diagnostic") {
    CHECK(check_derivative(parse_velocity("tanh:-1")) < 1e-6);
    const auto bad = VelocityProfile::custom([](double x) { return -x; }, [](double) { return 3.0; }, true);
    CHECK(check_derivative(bad) > 1.0);
    // u0 = -x against beta = -2: |u0 - beta x| = |x| >= radius outside the radius.
    CHECK(separation_from_line(VelocityProfile::linear(-1.0), -2.0, 1.0) == doctest::Approx(1.0).epsilon(0.05));
}
