#include "gradstorm/gaslimit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradstorm/errors.hpp"
#include "gradstorm/fit.hpp"
#include "gradstorm/parallel.hpp"

namespace gradstorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFloor = 1e-8;
constexpr quad::Tolerance kFineTol{1e-15, 1e-13, 20000, 240};
constexpr quad::Tolerance kInnerTol{1e-18, 1e-12, 20000, 240};

double step_t(double t) { return 1e-4 * std::max(1.0, t); }
double step_x(double x) { return 1e-4 * std::max(1.0, std::abs(x)); }

void require_positive_time(double t, const char* what) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument(std::string(what) + " needs t > 0");
}

struct RhoFlux {
    double rho;
    double u_hat;
};

RhoFlux rho_and_mean(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                     const NoiseModel& noise) {
    CondMeanOptions opts;
    opts.tol = kFineTol;
    return {marginal_density(t, x, f, v, noise, kFineTol), conditional_mean(t, x, f, v, noise, opts).u_hat};
}

}  // namespace

VanishingNoiseValue vanishing_noise_mean(const VelocityProfile& v, double t, double x,
                                         const CharacteristicOptions& opts) {
    require_positive_time(t, "vanishing_noise_mean");
    const auto outcome = solve_characteristics(v, t, x, opts);
    if (const auto* m = std::get_if<MultiRoot>(&outcome))
        throw MultiRootError("characteristics have crossed at t=" + std::to_string(t), m->count);
    if (std::holds_alternative<NoRoot>(outcome))
        throw NoRootError("no foot point for x=" + std::to_string(x) + " at t=" + std::to_string(t));
    const auto& root = std::get<UniqueRoot>(outcome);
    VanishingNoiseValue out;
    out.value = root.u;
    out.foot = root.s;
    out.non_differentiable = std::abs(1.0 + t * v.derivative(root.s)) < 1e-12;
    return out;
}

std::vector<double> default_sigma_sequence(int j_last) {
    std::vector<double> out;
    for (int j = 0; j <= j_last; ++j) out.push_back(std::ldexp(1.0, -j));
    return out;
}

SigmaConvergence sigma_convergence(const DensityProfile& f, const VelocityProfile& v, double t, double x,
                                   const std::vector<double>& sigma_seq, const CondMeanOptions& opts) {
    const double limit = vanishing_noise_mean(v, t, x).value;
    for (std::size_t i = 1; i < sigma_seq.size(); ++i)
        if (!(sigma_seq[i] < sigma_seq[i - 1])) throw InvalidArgument("sigma sequence must decrease");

    SigmaConvergence out;
    out.points = parallel_map<SigmaErrorPoint>(sigma_seq.size(), [&](std::size_t i) {
        SigmaErrorPoint p;
        p.sigma = sigma_seq[i];
        p.u_hat = conditional_mean(t, x, f, v, NoiseModel(p.sigma), opts).u_hat;
        p.limit = limit;
        p.error = std::abs(p.u_hat - limit);
        return p;
    });

    out.monotone = true;
    for (std::size_t i = 2; i < out.points.size(); ++i) {
        const double prev = out.points[i - 1].error;
        const double cur = out.points[i].error;
        if (cur > prev && cur > kFloor) out.monotone = false;
    }

    std::vector<double> xs, ys;
    for (std::size_t i = out.points.size() / 2; i < out.points.size(); ++i) {
        if (out.points[i].error > kFloor) {
            xs.push_back(out.points[i].sigma);
            ys.push_back(out.points[i].error);
        }
    }
    out.fitted_order = xs.size() >= 2 ? fit_power_law(xs, ys).exponent
                                      : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double lambda_term(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                   const NoiseModel& noise, const quad::Tolerance& tol) {
    require_positive_time(t, "lambda_term");
    CondMeanOptions opts;
    opts.tol = kFineTol;
    const double u_hat = conditional_mean(t, x, f, v, noise, opts).u_hat;
    const double sd = 0.5 * noise.sigma() * std::sqrt(t);
    std::vector<double> breaks = {u_hat};
    for (double m : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        breaks.push_back(u_hat - m * sd);
        breaks.push_back(u_hat + m * sd);
    }
    auto outer = [&](double u) {
        const double px = phase_density_dx(t, {x, u}, f, v, noise, kInnerTol);
        return quad::Vec<1>{px * (u - u_hat) * (u - u_hat)};
    };
    return -quad::integrate_line<1>(outer, breaks, -kInf, kInf, tol).value[0];
}

MomentumBalance momentum_balance(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                                 const NoiseModel& noise) {
    require_positive_time(t, "momentum_balance");
    const double ht = step_t(t);
    const double hx = step_x(x);
    if (!(t - ht > 0.0)) throw InvalidArgument("momentum_balance needs t well above 0");
    auto momentum = [&](double tt, double xx) {
        const auto r = rho_and_mean(tt, xx, f, v, noise);
        return r.rho * r.u_hat;
    };
    auto flux = [&](double tt, double xx) {
        const auto r = rho_and_mean(tt, xx, f, v, noise);
        return r.rho * r.u_hat * r.u_hat;
    };
    MomentumBalance out;
    out.time_derivative = (momentum(t + ht, x) - momentum(t - ht, x)) / (2.0 * ht);
    out.flux_derivative = (flux(t, x + hx) - flux(t, x - hx)) / (2.0 * hx);
    out.lambda = lambda_term(t, x, f, v, noise);
    out.residual = out.time_derivative + out.flux_derivative - out.lambda;
    const double scale = std::max({std::abs(out.time_derivative), std::abs(out.flux_derivative),
                                   std::abs(out.lambda), 1e-12});
    out.normalized = std::abs(out.residual) / scale;
    return out;
}

ResidualReport continuity_residual(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                                   const NoiseModel& noise) {
    require_positive_time(t, "continuity_residual");
    const double ht = step_t(t);
    const double hx = step_x(x);
    if (!(t - ht > 0.0)) throw InvalidArgument("continuity_residual needs t well above 0");
    auto rho = [&](double tt) { return marginal_density(tt, x, f, v, noise, kFineTol); };
    auto mass_flux = [&](double xx) {
        const auto r = rho_and_mean(t, xx, f, v, noise);
        return r.rho * r.u_hat;
    };
    const double dt = (rho(t + ht) - rho(t - ht)) / (2.0 * ht);
    const double dx = (mass_flux(x + hx) - mass_flux(x - hx)) / (2.0 * hx);
    ResidualReport out;
    out.residual = dt + dx;
    out.normalized = std::abs(out.residual) / std::max({std::abs(dt), std::abs(dx), 1e-12});
    return out;
}

ResidualReport burgers_residual(const VelocityProfile& v, double t, double x) {
    require_positive_time(t, "burgers_residual");
    const double ht = step_t(t);
    const double hx = step_x(x);
    auto val = [&](double tt, double xx) { return vanishing_noise_mean(v, tt, xx).value; };
    const double u = val(t, x);
    const double dt = (val(t + ht, x) - val(t - ht, x)) / (2.0 * ht);
    const double dx = (val(t, x + hx) - val(t, x - hx)) / (2.0 * hx);
    ResidualReport out;
    out.residual = dt + u * dx;
    out.normalized = std::abs(out.residual) / std::max({std::abs(dt), std::abs(u * dx), 1e-12});
    return out;
}

double total_mass(double t, const DensityProfile& f, const VelocityProfile& v, const NoiseModel& noise) {
    require_positive_time(t, "total_mass");
    std::vector<double> breaks = {0.0};
    for (int j = -3; j <= 6; ++j) {
        breaks.push_back(std::ldexp(1.0, j));
        breaks.push_back(-std::ldexp(1.0, j));
    }
    auto rho = [&](double x) { return quad::Vec<1>{marginal_density(t, x, f, v, noise, kInnerTol)}; };
    return quad::integrate_line<1>(rho, breaks, -kInf, kInf, {1e-14, 1e-10, 20000, 240}).value[0];
}

KineticReport kinetic_acceleration_check(double t, double x, double u, const DensityProfile& f,
                                         const VelocityProfile& v, const NoiseModel& noise) {
    require_positive_time(t, "kinetic_acceleration_check");
    const double ht = step_t(t);
    const double hx = step_x(x);
    const double hu = 1e-3 * std::max(1.0, std::abs(u));
    if (!(t - ht > 0.0)) throw InvalidArgument("kinetic_acceleration_check needs t well above 0");
    auto P = [&](double tt, double xx, double uu) { return phase_density(tt, {xx, uu}, f, v, noise, kFineTol); };
    CondMeanOptions opts;
    opts.tol = kFineTol;
    const double u_hat = conditional_mean(t, x, f, v, noise, opts).u_hat;

    const double p0 = P(t, x, u);
    const double p_up = P(t, x, u + hu);
    const double p_down = P(t, x, u - hu);
    const double dt = (P(t + ht, x, u) - P(t - ht, x, u)) / (2.0 * ht);
    const double dx = (P(t, x + hx, u) - P(t, x - hx, u)) / (2.0 * hx);
    auto flux = [&](double uu, double p) { return 2.0 / t * (u_hat - uu) * p; };
    const double d_flux = (flux(u + hu, p_up) - flux(u - hu, p_down)) / (2.0 * hu);
    const double duu = (p_up - 2.0 * p0 + p_down) / (hu * hu);

    KineticReport out;
    out.u_hat = u_hat;
    out.flux = flux(u, p0);
    out.residual = dt + u * dx + d_flux;
    out.normalized =
        std::abs(out.residual) / std::max({std::abs(dt), std::abs(u * dx), std::abs(d_flux), 1e-12});
    out.diffusion_term = 0.5 * noise.sigma() * noise.sigma() * duu;
    out.relaxation_term = -d_flux;
    out.fokker_planck_normalized = fokker_planck_residual(t, {x, u}, f, v, noise).normalized;
    return out;
}

}  // namespace gradstorm
