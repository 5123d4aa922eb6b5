#include <doctest.h>

#include <cmath>
#include <limits>

#include "gradstorm/closedform.hpp"
#include "gradstorm/condmean.hpp"
#include "gradstorm/errors.hpp"
#include "gradstorm/rng.hpp"

using namespace gradstorm;

TEST_CASE("uniform density reproduces the Burgers solution") {
    const auto s = conditional_mean(0.5, 1.0, DensityProfile::uniform(), VelocityProfile::linear(-1.0), NoiseModel(1.0));
    CHECK(s.u_hat == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(s.renormalized);
    REQUIRE(s.L_used.has_value());
    CHECK(*s.L_used >= 16.0);
}

TEST_CASE("uniform result does not depend on sigma") {
    const auto f = DensityProfile::uniform();
    const auto v = VelocityProfile::linear(-2.0);
    const double ref = conditional_mean(0.3, -1.2, f, v, NoiseModel(0.5)).u_hat;
    for (double sigma : {1.0, 2.0, 4.0})
        CHECK(conditional_mean(0.3, -1.2, f, v, NoiseModel(sigma)).u_hat == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("gaussian density matches the closed form, also at and after T") {
    const auto f = DensityProfile::gaussian(1.3);
    const auto v = VelocityProfile::linear(-1.0);
    const NoiseModel noise(0.8);
    for (double t : {0.2, 1.0, 2.0})
        for (double x : {-1.0, 0.5, 2.0})
            CHECK(conditional_mean(t, x, f, v, noise).u_hat ==
                  doctest::Approx(closedform::gaussian_mean(-1.0, 1.3, 0.8, t, x)).epsilon(1e-10));
    CHECK(conditional_mean(1.0, 2.0, DensityProfile::gaussian(1.0), v, NoiseModel(1.0)).u_hat ==
          doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("t = 0 returns the initial velocity") {
    const auto s = conditional_mean(0.0, 3.0, DensityProfile::gaussian(1.0), VelocityProfile::linear(-1.0), NoiseModel(1.0));
    CHECK(s.u_hat == -3.0);
    CHECK(s.du_hat_dx == -1.0);
    CHECK_THROWS_AS(conditional_mean(-0.1, 0.0, DensityProfile::uniform(), VelocityProfile::linear(-1.0), NoiseModel(1.0)),
                    InvalidArgument);
}

TEST_CASE("analytic derivative agrees with finite differences on random parameters") {
    for (std::uint64_t i = 0; i < 12; ++i) {
        SampleStream rng(77, i);
        const double alpha = -2.0 * rng.uniform();
        const double sigma = 0.3 + 1.5 * rng.uniform();
        const double t = 0.05 + 1.5 * rng.uniform();
        const double x = -2.0 + 4.0 * rng.uniform();
        const auto v = i % 2 ? VelocityProfile::linear(alpha) : parse_velocity("tanh:" + std::to_string(alpha));
        const auto f = i % 3 == 0 ? DensityProfile::gaussian(0.5 + rng.uniform()) : DensityProfile::power_law(-1.5);
        const auto d = spatial_derivative(t, x, f, v, NoiseModel(sigma));
        CHECK(d.analytic == doctest::Approx(d.finite_difference).epsilon(1e-6));
    }
}

TEST_CASE("renormalization settles for heavy tails and reports failure when it cannot") {
    const auto v = VelocityProfile::linear(-1.0);
    const auto s = conditional_mean(0.9, 0.4, DensityProfile::power_law(0.5), v, NoiseModel(1.0));
    CHECK(s.renormalized);
    CHECK(std::isfinite(s.u_hat));
    // At t = T the weight is flat in s, so u_hat is an average of -2s + 3x
    // under f on [-L, L]; for a one-sided linear ramp that average drifts with L forever.
    const auto drifting = DensityProfile::custom([](double s) { return s > 0.0 ? 1.0 + s : 1.0; }, false, false,
                                                 std::numeric_limits<double>::infinity());
    CondMeanOptions opts;
    opts.schedule.j_max = 12;
    CHECK_THROWS_AS(conditional_mean(1.0, 0.0, drifting, v, NoiseModel(1.0), opts), LimitNotReached);
    // The untruncated integral diverges there.
    CHECK_THROWS_AS(conditional_mean_direct(1.0, 0.0, DensityProfile::power_law(0.0), v, NoiseModel(1.0)), DivergentIntegral);
}

TEST_CASE("truncated values approach the renormalized limit") {
    const auto f = DensityProfile::uniform();
    const auto v = VelocityProfile::linear(-1.0);
    const NoiseModel noise(1.0);
    const double small = conditional_mean_truncated(0.5, 1.0, 2.0, f, v, noise).u_hat;
    const double big = conditional_mean_truncated(0.5, 1.0, 64.0, f, v, noise).u_hat;
    CHECK(std::abs(small + 2.0) > 1e-3);
    CHECK(big == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("blowup scan records per-point results and fits") {
    const auto s = blowup_scan(0.0, -1.0, NoiseModel(1.0), default_epsilon_grid(4, 20));
    CHECK(s.failures.empty());
    CHECK(s.epsilon_grid.size() == 17);
    CHECK(s.fitted_exponent == doctest::Approx(1.0).epsilon(0.02));
    CHECK(s.inverse_eps_prefactor == doctest::Approx(1.0).epsilon(0.02));
    CHECK_THROWS_AS(blowup_scan(0.0, 1.0, NoiseModel(1.0), default_epsilon_grid()), InvalidArgument);
    CHECK_THROWS_AS(blowup_scan(0.0, -1.0, NoiseModel(1.0), {-0.1, -0.2}), InvalidArgument);
}
