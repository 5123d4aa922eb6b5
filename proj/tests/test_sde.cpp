#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <vector>

#include "gradstorm/closedform.hpp"
#include "gradstorm/errors.hpp"
#include "gradstorm/parallel.hpp"
#include "gradstorm/sde.hpp"

using namespace gradstorm;

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
    }
    return d;
}

// 0.1% critical value of the one-sample KS statistic.
double ks_critical(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

}  // namespace

TEST_CASE("t = 0 returns the start") {
    SampleStream rng(1, 0);
    const auto p = sample_terminal(0.0, 0.3, -0.7, 1.0, rng);
    CHECK(p.x == 0.3);
    CHECK(p.u == -0.7);
}

TEST_CASE("exact sampler reproduces the kernel covariance") {
    const double t = 0.8, sigma = 1.3;
    const std::size_t n = 1'000'000;
    double sxx = 0, sxu = 0, suu = 0, sx = 0, su = 0;
    std::vector<double> xs, us;
    xs.reserve(n);
    us.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream rng(3, i);
        const auto p = sample_terminal(t, 0.0, 0.0, sigma, rng);
        sx += p.x;
        su += p.u;
        sxx += p.x * p.x;
        sxu += p.x * p.u;
        suu += p.u * p.u;
        xs.push_back(p.x);
        us.push_back(p.u);
    }
    const double dn = static_cast<double>(n);
    const double s2 = sigma * sigma;
    const double cxx = s2 * t * t * t / 3.0, cxu = s2 * t * t / 2.0, cuu = s2 * t;
    // Standard errors of the sample second moments of a centred Gaussian.
    CHECK(std::abs(sxx / dn - cxx) < 3.0 * std::sqrt(2.0 * cxx * cxx / dn));
    CHECK(std::abs(suu / dn - cuu) < 3.0 * std::sqrt(2.0 * cuu * cuu / dn));
    CHECK(std::abs(sxu / dn - cxu) < 3.0 * std::sqrt((cxx * cuu + cxu * cxu) / dn));
    CHECK(std::abs(sx / dn) < 3.0 * std::sqrt(cxx / dn));
    CHECK(std::abs(su / dn) < 3.0 * std::sqrt(cuu / dn));

    CHECK(ks_statistic(xs, [&](double x) { return normal_cdf(x / std::sqrt(cxx)); }) < ks_critical(n));
    CHECK(ks_statistic(us, [&](double u) { return normal_cdf(u / std::sqrt(cuu)); }) < ks_critical(n));
}

TEST_CASE("Euler-Maruyama oracle agrees with the exact sampler") {
    // Independent stepping at reduced size; the exact law is the reference.
    const double t = 1.0, sigma = 1.0, x0 = 0.2, u0 = -0.5;
    const std::size_t n = 100'000;
    const int steps = 1000;
    const double dt = t / steps;
    std::vector<double> xs(n), us(n);
    const auto paths = parallel_map<std::pair<double, double>>(n, [&](std::size_t i) {
        SampleStream rng(5, i, 1);
        double x = x0, u = u0;
        for (int k = 0; k < steps; ++k) {
            const double du = sigma * std::sqrt(dt) * rng.normal();
            x += (u + 0.5 * du) * dt;  // trapezoid in x keeps the variance bias O(dt^2)
            u += du;
        }
        return std::pair{x, u};
    });
    double mx = 0, mu = 0;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = paths[i].first;
        us[i] = paths[i].second;
        mx += xs[i] / n;
        mu += us[i] / n;
    }
    const double sdx = sigma * std::sqrt(t * t * t / 3.0), sdu = sigma * std::sqrt(t);
    CHECK(std::abs(mx - (x0 + u0 * t)) < 3.0 * sdx / std::sqrt(n));
    CHECK(std::abs(mu - u0) < 3.0 * sdu / std::sqrt(n));
    CHECK(ks_statistic(xs, [&](double x) { return normal_cdf((x - x0 - u0 * t) / sdx); }) < ks_critical(n));
    CHECK(ks_statistic(us, [&](double u) { return normal_cdf((u - u0) / sdu); }) < ks_critical(n));
}

TEST_CASE("two half steps compose to one step") {
    const double sigma = 0.9;
    const std::size_t n = 400'000;
    double a_xx = 0, a_xu = 0, b_xx = 0, b_xu = 0;
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream r1(7, i);
        const auto one = sample_terminal(1.0, 0.0, 0.0, sigma, r1);
        SampleStream r2(8, i);
        const auto half = sample_terminal(0.5, 0.0, 0.0, sigma, r2);
        // The second half starts from (half.x, half.u) with free flight.
        const auto two = sample_terminal(0.5, half.x, half.u, sigma, r2);
        a_xx += one.x * one.x / n;
        a_xu += one.x * one.u / n;
        b_xx += two.x * two.x / n;
        b_xu += two.x * two.u / n;
    }
    const double s2 = sigma * sigma;
    CHECK(std::abs(a_xx - b_xx) < 4.0 * std::sqrt(2.0) * std::sqrt(2.0) * (s2 / 3.0) / std::sqrt(n));
    CHECK(std::abs(a_xu - b_xu) < 4.0 * std::sqrt(2.0) * s2 / std::sqrt(n));
    CHECK(b_xx == doctest::Approx(s2 / 3.0).epsilon(0.01));
    CHECK(b_xu == doctest::Approx(s2 / 2.0).epsilon(0.01));
}

TEST_CASE("initial samplers") {
    const std::size_t n = 1'000'000;
    SUBCASE("Gaussian r = 1 has variance 1/2") {
        const InitialSampler s(DensityProfile::gaussian(1.0), std::nullopt);
        double m2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            SampleStream rng(9, i);
            const double x = s.draw(rng);
            m2 += x * x / n;
        }
        CHECK(std::abs(m2 - 0.5) < 3.0 * std::sqrt(2.0 * 0.25 / n));
    }
    SUBCASE("uniform on [-10, 10]") {
        const InitialSampler s(DensityProfile::uniform(), 10.0);
        double m = 0, mx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            SampleStream rng(10, i);
            const double x = s.draw(rng);
            m += x / n;
            mx = std::max(mx, std::abs(x));
        }
        CHECK(std::abs(m) < 3.0 * (10.0 / std::sqrt(3.0)) / std::sqrt(n));
        CHECK(mx <= 10.0);
        CHECK_THROWS_AS(InitialSampler(DensityProfile::uniform(), std::nullopt), InvalidArgument);
    }
    SUBCASE("power law k = -2 against its analytic CDF") {
        const InitialSampler s(DensityProfile::power_law(-2.0), std::nullopt);
        std::vector<double> xs;
        xs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            SampleStream rng(11, i);
            xs.push_back(s.draw(rng));
        }
        // int (1 + x^2)^-2 = (x/(1+x^2) + atan x)/2, total mass pi/2.
        auto cdf = [](double x) { return 0.5 + (x / (1.0 + x * x) + std::atan(x)) / std::numbers::pi; };
        CHECK(ks_statistic(xs, cdf) < ks_critical(n));
        CHECK(s.cdf(0.7) == doctest::Approx(cdf(0.7)).epsilon(1e-10));
        CHECK_THROWS_AS(InitialSampler(DensityProfile::power_law(0.5), std::nullopt), InvalidArgument);
    }
    SUBCASE("custom density beyond its envelope") {
        const auto bad = DensityProfile::custom([](double x) { return 1.0 + x * x; }, true, false, 1.0);
        const InitialSampler s(bad, 5.0);
        bool thrown = false;
        for (std::uint64_t i = 0; i < 100 && !thrown; ++i) {
            SampleStream rng(12, i);
            try {
                s.draw(rng);
            } catch (const EnvelopeViolation&) {
                thrown = true;
            }
        }
        CHECK(thrown);
    }
}

TEST_CASE("Monte Carlo conditional mean at the worked examples") {
    const NoiseModel noise(1.0);
    const auto v = VelocityProfile::linear(-1.0);
    {
        const std::vector<double> grid = {1.0};
        McConfig cfg;
        cfg.seed = 21;
        cfg.L = 50.0;
        cfg.n_samples = 4'000'000;
        const auto e = mc_conditional_mean(0.5, grid, DensityProfile::uniform(), v, noise, cfg).front();
        REQUIRE(e.reported);
        CHECK(std::abs(e.u_hat_mc - (-2.0 * e.x_mean)) < 3.0 * e.std_error);
    }
    {
        const std::vector<double> grid = {2.0};
        McConfig cfg;
        cfg.seed = 22;
        const auto e = mc_conditional_mean(1.0, grid, DensityProfile::gaussian(1.0), v, noise, cfg).front();
        REQUIRE(e.reported);
        CHECK(std::abs(e.u_hat_mc - closedform::gaussian_mean(-1.0, 1.0, 1.0, 1.0, e.x_mean)) < 3.0 * e.std_error);
        CHECK(closedform::gaussian_mean(-1.0, 1.0, 1.0, 1.0, 2.0) == doctest::Approx(3.0));
    }
}

TEST_CASE("sparse bins are flagged, not reported") {
    const std::vector<double> grid = {0.0, 40.0};
    McConfig cfg;
    cfg.n_samples = 10'000;
    cfg.seed = 3;
    const auto est = mc_conditional_mean(0.5, grid, DensityProfile::gaussian(1.0), VelocityProfile::linear(-1.0),
                                         NoiseModel(1.0), cfg);
    CHECK(est[0].reported);
    CHECK_FALSE(est[1].reported);
    CHECK(std::isnan(est[1].u_hat_mc));
    const std::vector<double> unsorted = {1.0, 0.0};
    CHECK_THROWS_AS(mc_conditional_mean(0.5, unsorted, DensityProfile::gaussian(1.0), VelocityProfile::linear(-1.0),
                                        NoiseModel(1.0), cfg),
                    InvalidArgument);
}

TEST_CASE("results do not depend on the thread count") {
    std::vector<double> grid;
    for (int i = -10; i <= 10; ++i) grid.push_back(0.2 * i);
    McConfig cfg;
    cfg.n_samples = 300'000;
    cfg.seed = 99;
    auto run = [&](const char* threads) {
        setenv("GRADSTORM_THREADS", threads, 1);
        return mc_conditional_mean(0.5, grid, DensityProfile::gaussian(1.0), VelocityProfile::linear(-1.0),
                                   NoiseModel(1.0), cfg);
    };
    const auto a = run("1");
    const auto b = run("4");
    unsetenv("GRADSTORM_THREADS");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].count_in_bin == b[i].count_in_bin);
        CHECK(std::memcmp(&a[i].u_hat_mc, &b[i].u_hat_mc, sizeof(double)) == 0);
        CHECK(std::memcmp(&a[i].std_error, &b[i].std_error, sizeof(double)) == 0);
    }
}
