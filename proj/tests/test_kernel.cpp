#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gradstorm/errors.hpp"
#include "gradstorm/kernel.hpp"

using namespace gradstorm;

TEST_CASE("covariance and determinant") {
    const GaussianKernelParams p(2.0, 0.5);
    CHECK(p.var_x() == doctest::Approx(0.25 * 8.0 / 3.0));
    CHECK(p.cov_xu() == doctest::Approx(0.25 * 4.0 / 2.0));
    CHECK(p.var_u() == doctest::Approx(0.25 * 2.0));
    CHECK(p.det() == doctest::Approx(std::pow(0.5, 4) * 16.0 / 12.0));
    CHECK_THROWS_AS(GaussianKernelParams(0.0, 1.0), InvalidArgument);
}

TEST_CASE("peak value of the kernel") {
    const double t = 1.3, sigma = 0.8;
    const GaussianKernelParams p(t, sigma);
    const PhasePoint start{0.4, -0.2};
    const double peak = transition_density(p, start, {start.x + start.u * t, start.u});
    CHECK(peak == doctest::Approx(std::sqrt(3.0) / (std::numbers::pi * sigma * sigma * t * t)).epsilon(1e-13));
}

TEST_CASE("written-out exponent equals the covariance form to 1e-12") {
    for (double t : {0.1, 1.0, 3.0}) {
        for (double sigma : {0.3, 1.0, 2.5}) {
            const GaussianKernelParams p(t, sigma);
            const double log_norm = -std::log(2.0 * std::numbers::pi * std::sqrt(p.det()));
            for (double s : {-2.0, 0.0, 1.5}) {
                for (double u0 : {-1.0, 0.5}) {
                    for (PhasePoint e : {PhasePoint{0.3, 0.1}, PhasePoint{-2.0, 1.7}, PhasePoint{4.0, -3.0}}) {
                        const double a = log_transition_density(p, {s, u0}, e) - log_norm;
                        const double b = expanded_exponent(t, sigma, s, u0, e);
                        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
                    }
                }
            }
        }
    }
}

TEST_CASE("the u-marginal of the kernel is the Gaussian s-weight") {
    const double t = 0.7, sigma = 1.2;
    const GaussianKernelParams p(t, sigma);
    for (double s : {-1.0, 0.0, 2.0}) {
        const double u0 = -0.5 * s;
        const double x = 0.3;
        const double weight = std::sqrt(3.0 / (2.0 * std::numbers::pi * sigma * sigma * t * t * t)) *
                              position_weight(t, sigma, s, u0, x);
        CHECK(kernel_velocity_marginal(p, {s, u0}, x) == doctest::Approx(weight).epsilon(1e-10));
    }
}

TEST_CASE("phase density integrates to the marginal density") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    const NoiseModel noise(0.7);
    const double t = 0.6, x = 0.4;
    auto g = [&](double u) { return quad::Vec<1>{phase_density(t, {x, u}, f, v, noise)}; };
    const double inf = std::numeric_limits<double>::infinity();
    const double integral = quad::integrate_line<1>(g, {-2.0, -1.0, 0.0, 1.0}, -inf, inf).value[0];
    CHECK(integral == doctest::Approx(marginal_density(t, x, f, v, noise)).epsilon(1e-9));
}

TEST_CASE("analytic x-derivative of the phase density") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = parse_velocity("tanh:-1");
    const NoiseModel noise(1.0);
    const double t = 0.8, x = 0.3, u = -0.1, h = 1e-5;
    const double fd = (phase_density(t, {x + h, u}, f, v, noise) - phase_density(t, {x - h, u}, f, v, noise)) / (2 * h);
    CHECK(phase_density_dx(t, {x, u}, f, v, noise) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("Fokker-Planck residual is small at interior points") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    const NoiseModel noise(1.0);
    for (double t : {0.4, 1.0, 1.6})
        for (double x : {-0.5, 0.0, 0.8})
            for (double u : {-0.6, 0.2}) CHECK(fokker_planck_residual(t, {x, u}, f, v, noise).normalized < 1e-3);
    // Uniform data: the same check on a non-normalizable density.
    CHECK(fokker_planck_residual(0.5, {1.0, -1.5}, DensityProfile::uniform(), v, noise).normalized < 1e-3);
}
