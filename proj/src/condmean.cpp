#include "gradstorm/condmean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradstorm/errors.hpp"
#include "gradstorm/fit.hpp"
#include "gradstorm/parallel.hpp"
#include "peaks.hpp"

namespace gradstorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Integrand pieces for one (t, x). For linear data the characteristic
// offset is formed as s (1 + alpha t) - x, which keeps its relative
// accuracy when 1 + alpha t is tiny.
struct RatioIntegrand {
    const DensityProfile& f;
    const VelocityProfile& v;
    double t;
    double x;
    double a;  // 3 / (2 sigma^2 t^3)
    std::optional<double> contraction;
    double shift = 0.0;

    RatioIntegrand(const DensityProfile& f_, const VelocityProfile& v_, double t_, double x_, double sigma)
        : f(f_), v(v_), t(t_), x(x_), a(3.0 / (2.0 * sigma * sigma * t_ * t_ * t_)) {
        if (const auto alpha = v.linear_slope()) contraction = 1.0 + *alpha * t;
    }

    double offset(double s) const { return contraction ? s * *contraction - x : v(s) * t + s - x; }

    double log_weight(double s) const {
        const double g = offset(s);
        return f.log_eval(s) - a * g * g;
    }

    // [D, N, dD/dx, dN/dx] integrands.
    quad::Vec<4> operator()(double s) const {
        const double g = offset(s);
        const double e = std::exp(f.log_eval(s) - a * g * g - shift);
        const double h = -g - 2.0 * (s - x);  // -u0 t - 3(s - x)
        return {e, h * e, 2.0 * a * g * e, (3.0 + 2.0 * a * h * g) * e};
    }
};

MeanFieldSample ratio_sample(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                             const NoiseModel& noise, double lo, double hi, const quad::Tolerance& tol) {
    RatioIntegrand integrand(f, v, t, x, noise.sigma());
    const auto peaks = detail::weight_peaks(v, t, x, noise.sigma());
    const auto breaks = detail::core_breaks(peaks, f);

    std::vector<double> candidates = breaks;
    candidates.insert(candidates.end(), peaks.centers.begin(), peaks.centers.end());
    candidates.push_back(0.0);
    integrand.shift = detail::refined_log_max([&](double s) { return integrand.log_weight(s); },
                                              std::move(candidates), lo, hi);

    const auto est = quad::integrate_line<4>(integrand, breaks, lo, hi, tol);
    const double D = est.value[0];
    const double N = est.value[1];
    const double Dp = est.value[2];
    const double Np = est.value[3];
    if (!(D > 0.0) || !std::isfinite(D))
        throw NonConvergent("weight integral vanished or overflowed at t=" + std::to_string(t) +
                                " x=" + std::to_string(x),
                            kInf);

    MeanFieldSample out;
    out.t = t;
    out.x = x;
    out.u_hat = N / (2.0 * t * D);
    out.du_hat_dx = (Np / D - (N / D) * (Dp / D)) / (2.0 * t);
    out.quadrature_error = (est.error[1] + std::abs(N / D) * est.error[0]) / (2.0 * t * D);
    return out;
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("conditional mean needs finite t >= 0");
}

std::optional<MeanFieldSample> initial_value(double t, double x, const VelocityProfile& v,
                                             const CondMeanOptions& opts) {
    if (t >= opts.t_min) return std::nullopt;
    MeanFieldSample out;
    out.t = t;
    out.x = x;
    out.u_hat = v(x);
    out.du_hat_dx = v.derivative(x);
    return out;
}

bool agree(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) || std::abs(a - b) <= 1e-12;
}

}  // namespace

MeanFieldSample conditional_mean_direct(double t, double x, const DensityProfile& f,
                                        const VelocityProfile& v, const NoiseModel& noise,
                                        const CondMeanOptions& opts) {
    check_time(t);
    if (auto init = initial_value(t, x, v, opts)) return *init;
    return ratio_sample(t, x, f, v, noise, -kInf, kInf, opts.tol);
}

MeanFieldSample conditional_mean_truncated(double t, double x, double L, const DensityProfile& f,
                                           const VelocityProfile& v, const NoiseModel& noise,
                                           const CondMeanOptions& opts) {
    check_time(t);
    if (!(L > 0.0)) throw InvalidArgument("truncation half-width L must be > 0");
    if (auto init = initial_value(t, x, v, opts)) return *init;
    auto out = ratio_sample(t, x, f, v, noise, -L, L, opts.tol);
    out.renormalized = true;
    out.L_used = L;
    return out;
}

MeanFieldSample conditional_mean_renormalized(double t, double x, const DensityProfile& f,
                                              const VelocityProfile& v, const NoiseModel& noise,
                                              const CondMeanOptions& opts) {
    check_time(t);
    if (auto init = initial_value(t, x, v, opts)) return *init;
    const auto& sched = opts.schedule;
    const double L_max = std::ldexp(1.0, sched.j_max);
    const auto peaks = detail::weight_peaks(v, t, x, noise.sigma());
    const double must_cover = std::min(L_max, detail::peak_extent(peaks));

    std::vector<MeanFieldSample> history;
    for (int j = sched.j_min; j <= sched.j_max; ++j) {
        const double L = std::ldexp(1.0, j);
        MeanFieldSample s;
        try {
            s = conditional_mean_truncated(t, x, L, f, v, noise, opts);
        } catch (const NonConvergent&) {
            // Window still misses the weight entirely.
            if (L < must_cover) continue;
            throw;
        }
        if (L < must_cover) continue;
        history.push_back(s);
        const auto n = static_cast<std::size_t>(sched.agreeing_values);
        if (history.size() < n) continue;
        bool settled = true;
        for (std::size_t i = history.size() - n; i + 1 < history.size(); ++i) {
            settled = settled && agree(history[i].u_hat, history[i + 1].u_hat, sched.rel_agreement) &&
                      agree(history[i].du_hat_dx, history[i + 1].du_hat_dx, sched.rel_agreement);
        }
        if (settled) return history.back();
    }
    throw LimitNotReached("truncated ratio did not settle by L = 2^" + std::to_string(sched.j_max) +
                              " at t=" + std::to_string(t) + " x=" + std::to_string(x),
                          L_max);
}

MeanFieldSample conditional_mean(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                                 const NoiseModel& noise, const CondMeanOptions& opts) {
    if (f.normalizable()) return conditional_mean_direct(t, x, f, v, noise, opts);
    return conditional_mean_renormalized(t, x, f, v, noise, opts);
}

DerivativeEstimate spatial_derivative(double t, double x, const DensityProfile& f,
                                      const VelocityProfile& v, const NoiseModel& noise,
                                      const CondMeanOptions& opts) {
    DerivativeEstimate out;
    out.analytic = conditional_mean(t, x, f, v, noise, opts).du_hat_dx;
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    const double up = conditional_mean(t, x + h, f, v, noise, opts).u_hat;
    const double down = conditional_mean(t, x - h, f, v, noise, opts).u_hat;
    out.finite_difference = (up - down) / (2.0 * h);
    return out;
}

std::vector<double> default_epsilon_grid(int m_first, int m_last) {
    std::vector<double> grid;
    for (int m = m_first; m <= m_last; ++m) grid.push_back(-std::pow(10.0, -m / 4.0));
    return grid;
}

BlowupScanResult blowup_scan(double k, double alpha, const NoiseModel& noise,
                             const std::vector<double>& epsilon_grid, const CondMeanOptions& opts) {
    if (!(alpha < 0.0)) throw InvalidArgument("blowup scan needs alpha < 0");
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
        if (!(epsilon_grid[i] < 0.0)) throw InvalidArgument("epsilon grid must be negative");
        if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1]))
            throw InvalidArgument("epsilon grid must increase toward 0");
    }

    const auto f = DensityProfile::power_law(k);
    const auto v = VelocityProfile::linear(alpha);
    const double T = -1.0 / alpha;

    struct Point {
        double slope = kNaN;
        bool renormalized = false;
        double L = kNaN;
        std::string error;
    };
    const auto points = parallel_map<Point>(epsilon_grid.size(), [&](std::size_t i) {
        Point p;
        try {
            const auto s = conditional_mean(T + epsilon_grid[i], 0.0, f, v, noise, opts);
            p.slope = s.du_hat_dx;
            p.renormalized = s.renormalized;
            if (s.L_used) p.L = *s.L_used;
        } catch (const Error& e) {
            p.error = e.what();
        }
        return p;
    });

    BlowupScanResult out;
    out.k = k;
    out.alpha = alpha;
    out.sigma = noise.sigma();
    out.epsilon_grid = epsilon_grid;
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.slope_at_origin.push_back(points[i].slope);
        out.renormalized.push_back(points[i].renormalized);
        out.L_used.push_back(points[i].L);
        if (!points[i].error.empty()) out.failures.push_back({i, points[i].error});
    }
    if (epsilon_grid.empty()) return out;

    // Last decade: |eps| within a factor 10 of the point closest to zero.
    const double nearest = std::abs(epsilon_grid.back());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
        const double e = std::abs(epsilon_grid[i]);
        if (e <= 10.0 * nearest * (1.0 + 1e-12) && std::isfinite(out.slope_at_origin[i])) {
            xs.push_back(e);
            ys.push_back(out.slope_at_origin[i]);
        }
    }
    out.fit_points = xs.size();
    if (xs.size() < 2) return out;

    try {
        const auto fit = fit_power_law(xs, ys);
        out.fitted_exponent = -fit.exponent;
        out.fitted_prefactor = fit.prefactor;
    } catch (const InvalidArgument&) {
        out.fitted_exponent = kNaN;
        out.fitted_prefactor = kNaN;
    }

    double b_sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) b_sum += ys[i] * -xs[i];
    out.inverse_eps_prefactor = b_sum / static_cast<double>(xs.size());

    // y ~ c m with m = -1/(eps ln(-eps)) = 1/(|eps| ln|eps|).
    double num = 0.0, den = 0.0;
    std::vector<double> ms;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double m = 1.0 / (xs[i] * std::log(xs[i]));
        ms.push_back(m);
        num += m / ys[i];
        den += (m / ys[i]) * (m / ys[i]);
    }
    out.log_model_prefactor = num / den;
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        worst = std::max(worst, std::abs(ys[i] - out.log_model_prefactor * ms[i]) / std::abs(ys[i]));
    out.log_model_residual = worst;
    return out;
}

}  // namespace gradstorm
