#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gradstorm/burgers.hpp"
#include "gradstorm/closedform.hpp"
#include "gradstorm/condmean.hpp"
#include "gradstorm/errors.hpp"
#include "gradstorm/gaslimit.hpp"
#include "gradstorm/quadrature.hpp"
#include "gradstorm/rng.hpp"

using namespace gradstorm;

namespace {

// Lambda from the conditional law of U given (X = x, start s): Gaussian with
// mean m(s) = (-u0 t - 3(s - x))/(2t) and variance sigma^2 t / 4. Writing the
// s-weight as q(s) = sqrt(a/pi) exp(-a g^2), g = u0 t + s - x, gives
//   Lambda = -int f [2 a g q (V + (m - c)^2) + 3 q (m - c)/t] ds,  c = u_hat.
double lambda_moment_form(double t, double x, const DensityProfile& f, const VelocityProfile& v, double sigma) {
    const double a = 3.0 / (2.0 * sigma * sigma * t * t * t);
    const double V = sigma * sigma * t / 4.0;
    const double c = conditional_mean(t, x, f, v, NoiseModel(sigma)).u_hat;
    auto g = [&](double s) {
        const double gg = v(s) * t + s - x;
        const double q = std::sqrt(a / std::numbers::pi) * std::exp(-a * gg * gg);
        const double m = (-v(s) * t - 3.0 * (s - x)) / (2.0 * t);
        return f(s) * (2.0 * a * gg * q * (V + (m - c) * (m - c)) + 3.0 * q * (m - c) / t);
    };
    std::vector<double> br;
    for (int i = -40; i <= 40; ++i) br.push_back(0.5 * i);
    return -quad::integrate_scalar(g, br, {1e-16, 1e-12, 20000, 240});
}

}  // namespace

TEST_CASE("vanishing-noise mean") {
    const auto r = vanishing_noise_mean(VelocityProfile::linear(-1.0), 0.5, 1.0);
    CHECK(r.foot == doctest::Approx(2.0));
    CHECK(r.value == doctest::Approx(-2.0));
    CHECK_FALSE(r.non_differentiable);
    CHECK_THROWS_AS(vanishing_noise_mean(VelocityProfile::linear(-1.0), 1.5, 0.0), MultiRootError);
    CHECK_THROWS_AS(vanishing_noise_mean(VelocityProfile::linear(-1.0), 0.0, 0.0), InvalidArgument);
}

TEST_CASE("tanh data: the foot point inverts the forward map") {
    const auto v = parse_velocity("tanh:-1");
    const auto r = vanishing_noise_mean(v, 0.3, 0.5);
    CHECK(r.foot + 0.3 * v(r.foot) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.value == doctest::Approx(v(r.foot)));
}

TEST_CASE("agrees with the characteristic solver on random pre-shock points") {
    const auto v = parse_velocity("tanh:-1");
    for (std::uint64_t i = 0; i < 100; ++i) {
        SampleStream rng(11, i);
        const double t = 0.01 + 0.9 * rng.uniform();
        const double x = -5.0 + 10.0 * rng.uniform();
        const auto ref = std::get<UniqueRoot>(solve_characteristics(v, t, x)).u;
        CHECK(std::abs(vanishing_noise_mean(v, t, x).value - ref) <= 1e-10);
        CHECK(std::abs(vanishing_noise_mean(VelocityProfile::linear(-1.0), t, x).value -
                       closedform::burgers_linear(-1.0, t, x)) <= 1e-10);
    }
}

TEST_CASE("sigma convergence for Gaussian data follows the exact gap") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    const auto conv = sigma_convergence(f, v, 0.5, 1.0, default_sigma_sequence(10));
    CHECK(conv.monotone);
    CHECK(conv.points.back().error < 1e-4);
    CHECK(conv.fitted_order == doctest::Approx(2.0).epsilon(0.01));
    for (const auto& p : conv.points) {
        const double gap = std::abs(closedform::gaussian_mean(-1.0, 1.0, p.sigma, 0.5, 1.0) + 2.0);
        CHECK(std::abs(p.error - gap) <= 1e-8);
    }
    CHECK_THROWS_AS(sigma_convergence(f, v, 0.5, 1.0, {0.5, 1.0}), InvalidArgument);
}

TEST_CASE("Lambda vanishes at the symmetry point") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    CHECK(std::abs(lambda_term(0.6, 0.0, f, v, NoiseModel(1.0))) < 1e-12);
    CHECK(std::abs(lambda_term(0.6, 0.0, f, parse_velocity("tanh:-1"), NoiseModel(0.7))) < 1e-12);
}

TEST_CASE("Lambda matches the moment form") {
    const auto f = DensityProfile::gaussian(1.0);
    for (const auto& v : {VelocityProfile::linear(-1.0), parse_velocity("tanh:-1")}) {
        for (double x : {0.4, -1.1}) {
            const double nested = lambda_term(0.6, x, f, v, NoiseModel(1.0));
            CHECK(nested == doctest::Approx(lambda_moment_form(0.6, x, f, v, 1.0)).epsilon(1e-8));
        }
    }
}

TEST_CASE("Lambda decreases with the noise") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    double prev = std::abs(lambda_term(0.6, 0.7, f, v, NoiseModel(1.0)));
    for (int j = 1; j <= 6; ++j) {
        const double cur = std::abs(lambda_term(0.6, 0.7, f, v, NoiseModel(std::ldexp(1.0, -j))));
        CHECK((cur < prev || cur < 1e-10));
        prev = cur;
    }
}

TEST_CASE("momentum balance closes with Lambda") {
    const auto f = DensityProfile::gaussian(1.0);
    for (const auto& v : {VelocityProfile::linear(-1.0), parse_velocity("tanh:-1")})
        for (double x : {-0.8, 0.3, 1.2}) CHECK(momentum_balance(0.6, x, f, v, NoiseModel(1.0)).normalized < 1e-3);
}

TEST_CASE("continuity residual on a 5x5 stencil, and invariance under f -> c f") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    const NoiseModel noise(1.0);
    for (double t : {0.3, 0.5, 0.7, 1.0, 1.4})
        for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) CHECK(continuity_residual(t, x, f, v, noise).normalized < 1e-3);

    const auto scaled = DensityProfile::custom([](double x) { return 7.0 * std::exp(-x * x) / std::sqrt(std::numbers::pi); },
                                               true, true, 7.0);
    const auto a = continuity_residual(0.5, 0.4, f, v, noise);
    const auto b = continuity_residual(0.5, 0.4, scaled, v, noise);
    CHECK(b.normalized == doctest::Approx(a.normalized).epsilon(1e-4));
    CHECK(b.residual == doctest::Approx(7.0 * a.residual).epsilon(1e-4));
    CHECK_THROWS_AS(continuity_residual(0.0, 0.0, f, v, noise), InvalidArgument);
}

TEST_CASE("mass is conserved") {
    const auto f = DensityProfile::gaussian(1.0);
    for (const auto& v : {VelocityProfile::linear(-1.0), parse_velocity("tanh:-1")})
        for (double t : {0.1, 0.5, 1.0}) CHECK(std::abs(total_mass(t, f, v, NoiseModel(1.0)) - 1.0) < 1e-6);
}

TEST_CASE("the limit satisfies Burgers before the shock") {
    for (const auto& v : {VelocityProfile::linear(-1.0), parse_velocity("tanh:-1")})
        for (double t : {0.2, 0.5, 0.8})
            for (double x : {-1.0, 0.3, 2.0}) CHECK(burgers_residual(v, t, x).normalized < 1e-4);
}

TEST_CASE("kinetic form with acceleration (2/t)(u_hat - u)") {
    const auto f = DensityProfile::gaussian(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    const NoiseModel noise(1.0);
    const double t = 0.6, x = 0.7;
    const double u_hat = conditional_mean(t, x, f, v, noise).u_hat;

    // The flux changes sign across u = u_hat.
    const auto below = kinetic_acceleration_check(t, x, u_hat - 0.3, f, v, noise);
    const auto above = kinetic_acceleration_check(t, x, u_hat + 0.3, f, v, noise);
    CHECK(below.flux > 0.0);
    CHECK(above.flux < 0.0);

    // Joint report: the Fokker-Planck residual is small at the same points.
    CHECK(below.fokker_planck_normalized < 1e-3);
    CHECK(above.fokker_planck_normalized < 1e-3);

    // Integrated against 1 and u the kinetic residual vanishes: the closure
    // carries the right mass and momentum. Trapezoid rule on a wide u-grid.
    double m0 = 0.0, m1 = 0.0, scale0 = 0.0, scale1 = 0.0;
    const double sd = 0.5 * std::sqrt(t) + 1.0;
    const int n = 240;
    const double h = 16.0 * sd / n;
    for (int i = 0; i <= n; ++i) {
        const double u = u_hat - 8.0 * sd + h * i;
        const auto k = kinetic_acceleration_check(t, x, u, f, v, noise);
        const double w = (i == 0 || i == n) ? 0.5 * h : h;
        m0 += w * k.residual;
        m1 += w * u * k.residual;
        scale0 += w * std::abs(k.relaxation_term);
        scale1 += w * std::abs(u * k.relaxation_term);
    }
    CHECK(std::abs(m0) < 1e-4 * scale0);
    CHECK(std::abs(m1) < 1e-4 * scale1);

    // Pointwise the two closures differ: the relaxation term does not
    // reproduce (sigma^2/2) P_uu, so the normalized kinetic residual is O(1).
    const auto mid = kinetic_acceleration_check(t, x, u_hat + 0.5, f, v, noise);
    CHECK(mid.normalized > 0.1);
    CHECK(std::abs(mid.diffusion_term - mid.relaxation_term) > 0.1 * std::abs(mid.diffusion_term));
}
