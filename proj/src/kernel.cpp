#include "gradstorm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gradstorm/errors.hpp"
#include "peaks.hpp"

namespace gradstorm {

namespace {

constexpr quad::Tolerance kResidualTol{1e-14, 1e-13, 20000, 240};

// Anchors for the u-constraint, linear case only: u0(s) = u and the
// minimiser of the kernel exponent, which is quadratic in s. Custom
// profiles rely on the x-peaks and the geometric ladder.
std::vector<double> velocity_anchors(const VelocityProfile& v, double t, double x, double u) {
    const auto alpha = v.linear_slope();
    if (!alpha) return {};
    std::vector<double> out;
    if (*alpha != 0.0) out.push_back(u / *alpha);
    const double c = 1.0 + *alpha * t;
    const double A = 12.0 / (t * t * t), B = 12.0 / (t * t), C = 4.0 / t;
    const double coef = 2.0 * (A * c * c - B * c * *alpha + C * *alpha * *alpha);
    const double cst = -2.0 * A * c * x + B * (c * u + *alpha * x) - 2.0 * C * *alpha * u;
    if (coef > 0.0) out.push_back(-cst / coef);
    return out;
}

struct KernelTerms {
    double log_density;
    double dlog_dx;
};

KernelTerms kernel_terms(const GaussianKernelParams& p, PhasePoint start, PhasePoint end) {
    const double t = p.t();
    const double s2 = p.sigma() * p.sigma();
    const double d1 = end.x - start.x - start.u * t;
    const double d2 = end.u - start.u;
    // Precision matrix (1/sigma^2) [[12/t^3, -6/t^2], [-6/t^2, 4/t]].
    const double q = (12.0 * d1 * d1 / (t * t * t) - 12.0 * d1 * d2 / (t * t) + 4.0 * d2 * d2 / t) / s2;
    const double log_norm = -std::log(2.0 * std::numbers::pi * std::sqrt(p.det()));
    const double dq_dx = (24.0 * d1 / (t * t * t) - 12.0 * d2 / (t * t)) / s2;
    return {log_norm - 0.5 * q, -0.5 * dq_dx};
}

template <class Integrand>
double integrate_over_s(Integrand&& g, double t, PhasePoint pp, const DensityProfile& f,
                        const VelocityProfile& v, double sigma, const quad::Tolerance& tol,
                        double shift) {
    const auto peaks = detail::weight_peaks(v, t, pp.x, sigma);
    auto breaks = detail::core_breaks(peaks, f, velocity_anchors(v, t, pp.x, pp.u));
    auto wrapped = [&](double s) { return quad::Vec<1>{g(s, shift)}; };
    const auto est = quad::integrate_line<1>(wrapped, breaks, -std::numeric_limits<double>::infinity(),
                                             std::numeric_limits<double>::infinity(), tol);
    return est.value[0];
}

// Log of the largest f(s) K(s), to keep exp() in range.
template <class LogFn>
double log_shift(LogFn&& logfn, const detail::WeightPeaks& peaks, const DensityProfile& f,
                 std::vector<double> anchors) {
    auto candidates = detail::core_breaks(peaks, f, anchors);
    candidates.insert(candidates.end(), anchors.begin(), anchors.end());
    candidates.insert(candidates.end(), peaks.centers.begin(), peaks.centers.end());
    candidates.push_back(0.0);
    constexpr double inf = std::numeric_limits<double>::infinity();
    return detail::refined_log_max(logfn, std::move(candidates), -inf, inf);
}

}  // namespace

GaussianKernelParams::GaussianKernelParams(double t, double sigma) : t_(t), sigma_(sigma) {
    if (!(t > 0.0)) throw InvalidArgument("transition kernel needs t > 0");
    if (!(sigma > 0.0)) throw InvalidArgument("transition kernel needs sigma > 0");
}

double log_transition_density(const GaussianKernelParams& params, PhasePoint start, PhasePoint end) {
    return kernel_terms(params, start, end).log_density;
}

double transition_density(const GaussianKernelParams& params, PhasePoint start, PhasePoint end) {
    return std::exp(log_transition_density(params, start, end));
}

double expanded_exponent(double t, double sigma, double s, double u0s, PhasePoint end) {
    const double u = end.u;
    const double x = end.x;
    const double bracket = 3.0 * t * t * u * u0s + t * t * (u0s - u) * (u0s - u) +
                           3.0 * (x - s) * (x - s) + 3.0 * t * (u + u0s) * (s - x);
    return -2.0 / (sigma * sigma * t * t * t) * bracket;
}

double position_weight(double t, double sigma, double s, double u0s, double x) {
    const double g = u0s * t + s - x;
    return std::exp(-3.0 * g * g / (2.0 * sigma * sigma * t * t * t));
}

double kernel_velocity_marginal(const GaussianKernelParams& params, PhasePoint start, double x,
                                const quad::Tolerance& tol) {
    // Conditional on X = x the velocity is centred near start.u + 3 d1 / (2t)
    // with standard deviation sigma sqrt(t) / 2.
    const double t = params.t();
    const double d1 = x - start.x - start.u * t;
    const double centre = start.u + 1.5 * d1 / t;
    const double sd = 0.5 * params.sigma() * std::sqrt(t);
    std::vector<double> breaks;
    for (double m = -16.0; m <= 16.0; m += 2.0) breaks.push_back(centre + m * sd);
    auto g = [&](double u) { return quad::Vec<1>{transition_density(params, start, {x, u})}; };
    return quad::integrate_line<1>(g, breaks, -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity(), tol)
        .value[0];
}

double phase_density(double t, PhasePoint pp, const DensityProfile& f, const VelocityProfile& v,
                     const NoiseModel& noise, const quad::Tolerance& tol) {
    const GaussianKernelParams params(t, noise.sigma());
    auto logfn = [&](double s) {
        return f.log_eval(s) + log_transition_density(params, {s, v(s)}, pp);
    };
    const auto peaks = detail::weight_peaks(v, t, pp.x, noise.sigma());
    const double shift = log_shift(logfn, peaks, f, velocity_anchors(v, t, pp.x, pp.u));
    auto g = [&](double s, double sh) { return std::exp(logfn(s) - sh); };
    return std::exp(shift) * integrate_over_s(g, t, pp, f, v, noise.sigma(), tol, shift);
}

double phase_density_dx(double t, PhasePoint pp, const DensityProfile& f, const VelocityProfile& v,
                        const NoiseModel& noise, const quad::Tolerance& tol) {
    const GaussianKernelParams params(t, noise.sigma());
    auto logfn = [&](double s) {
        return f.log_eval(s) + log_transition_density(params, {s, v(s)}, pp);
    };
    const auto peaks = detail::weight_peaks(v, t, pp.x, noise.sigma());
    const double shift = log_shift(logfn, peaks, f, velocity_anchors(v, t, pp.x, pp.u));
    auto g = [&](double s, double sh) {
        const auto terms = kernel_terms(params, {s, v(s)}, pp);
        return terms.dlog_dx * std::exp(f.log_eval(s) + terms.log_density - sh);
    };
    return std::exp(shift) * integrate_over_s(g, t, pp, f, v, noise.sigma(), tol, shift);
}

double marginal_density(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                        const NoiseModel& noise, const quad::Tolerance& tol) {
    if (!(t > 0.0)) throw InvalidArgument("marginal density needs t > 0");
    const double sigma = noise.sigma();
    const double a = 3.0 / (2.0 * sigma * sigma * t * t * t);
    const double norm = std::sqrt(a / std::numbers::pi);
    auto logfn = [&](double s) {
        const double g = v(s) * t + s - x;
        return f.log_eval(s) - a * g * g;
    };
    const auto peaks = detail::weight_peaks(v, t, x, sigma);
    const double shift = log_shift(logfn, peaks, f, {});
    auto g = [&](double s, double sh) { return std::exp(logfn(s) - sh); };
    return norm * std::exp(shift) * integrate_over_s(g, t, {x, 0.0}, f, v, sigma, tol, shift);
}

ResidualReport fokker_planck_residual(double t, PhasePoint pp, const DensityProfile& f,
                                      const VelocityProfile& v, const NoiseModel& noise) {
    const double ht = 1e-4 * std::max(1.0, t);
    const double hx = 1e-4 * std::max(1.0, std::abs(pp.x));
    const double hu = 1e-3 * std::max(1.0, std::abs(pp.u));
    if (!(t - ht > 0.0)) throw InvalidArgument("Fokker-Planck residual needs t well above 0");
    auto P = [&](double tt, double xx, double uu) {
        return phase_density(tt, {xx, uu}, f, v, noise, kResidualTol);
    };
    const double p0 = P(t, pp.x, pp.u);
    const double dt = (P(t + ht, pp.x, pp.u) - P(t - ht, pp.x, pp.u)) / (2.0 * ht);
    const double dx = (P(t, pp.x + hx, pp.u) - P(t, pp.x - hx, pp.u)) / (2.0 * hx);
    const double duu = (P(t, pp.x, pp.u + hu) - 2.0 * p0 + P(t, pp.x, pp.u - hu)) / (hu * hu);
    const double diffusion = 0.5 * noise.sigma() * noise.sigma() * duu;
    const double advection = pp.u * dx;
    ResidualReport out;
    out.residual = dt + advection - diffusion;
    const double scale =
        std::max({std::abs(dt), std::abs(advection), std::abs(diffusion), 1e-12});
    out.normalized = std::abs(out.residual) / scale;
    return out;
}

}  // namespace gradstorm
