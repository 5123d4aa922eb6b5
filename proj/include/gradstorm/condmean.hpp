#pragma once

// The conditional mean velocity u_hat(t, x) = E[U_t | X_t = x] of the
// Langevin system started from the density f with velocities u0, and its
// spatial derivative:
//
//   u_hat = (1/2t) N / D,
//   N = int (-u0(s) t - 3(s - x)) f(s) w(s) ds,   D = int f(s) w(s) ds,
//   w(s) = exp(-3 (u0(s) t + s - x)^2 / (2 sigma^2 t^3)).
//
// Densities that cannot be normalized are truncated to [-L, L] and the
// ratio is followed as L doubles until it settles.

#include <optional>
#include <string>
#include <vector>

#include "gradstorm/profiles.hpp"
#include "gradstorm/quadrature.hpp"

namespace gradstorm {

struct LSchedule {
    int j_min = 4;    // first L = 2^j_min
    int j_max = 40;   // last L = 2^j_max
    double rel_agreement = 1e-8;
    int agreeing_values = 3;
};

struct CondMeanOptions {
    quad::Tolerance tol{};
    LSchedule schedule{};
    // Below this time the kernel is numerically a delta and u0(x) is returned.
    double t_min = 1e-8;
};

struct MeanFieldSample {
    double t = 0.0;
    double x = 0.0;
    double u_hat = 0.0;
    double du_hat_dx = 0.0;
    double quadrature_error = 0.0;  // absolute error estimate of u_hat
    bool renormalized = false;
    std::optional<double> L_used;
};

/// u_hat and its derivative. Normalizable densities integrate over the whole
/// line; the others go through conditional_mean_renormalized.
MeanFieldSample conditional_mean(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                                 const NoiseModel& noise, const CondMeanOptions& opts = {});

/// The ratio over the whole line with f as given, whether or not f is
/// normalizable. Raises DivergentIntegral when an integral's tail does not
/// decay (a flat weight at t = -1/alpha with a heavy-tailed f, say).
MeanFieldSample conditional_mean_direct(double t, double x, const DensityProfile& f,
                                        const VelocityProfile& v, const NoiseModel& noise,
                                        const CondMeanOptions& opts = {});

/// The ratio with f truncated to [-L, L], for one L.
MeanFieldSample conditional_mean_truncated(double t, double x, double L, const DensityProfile& f,
                                           const VelocityProfile& v, const NoiseModel& noise,
                                           const CondMeanOptions& opts = {});

/// L = 2^j for j in the schedule; converged once the last `agreeing_values`
/// values of both u_hat and its derivative agree to rel_agreement. Values
/// are only compared once L covers every weight peak out to 12 widths.
/// Raises LimitNotReached otherwise.
MeanFieldSample conditional_mean_renormalized(double t, double x, const DensityProfile& f,
                                              const VelocityProfile& v, const NoiseModel& noise,
                                              const CondMeanOptions& opts = {});

struct DerivativeEstimate {
    double analytic = 0.0;           // differentiation under the integral sign
    double finite_difference = 0.0;  // central, h = 1e-4 max(1, |x|)
};

DerivativeEstimate spatial_derivative(double t, double x, const DensityProfile& f,
                                      const VelocityProfile& v, const NoiseModel& noise,
                                      const CondMeanOptions& opts = {});

struct ScanFailure {
    std::size_t index = 0;
    std::string message;
};

struct BlowupScanResult {
    double k = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    std::vector<double> epsilon_grid;     // t - T, negative, increasing to 0-
    std::vector<double> slope_at_origin;  // d u_hat/dx (T + eps, 0); NaN where failed
    std::vector<bool> renormalized;
    std::vector<double> L_used;           // NaN when not renormalized
    std::vector<ScanFailure> failures;

    // Power-law fit |slope| = C |eps|^(-exponent) over the last decade.
    double fitted_exponent = 0.0;
    double fitted_prefactor = 0.0;  // signed C
    std::size_t fit_points = 0;
    // Mean of slope * eps over the last decade: the prefactor B of B / eps.
    double inverse_eps_prefactor = 0.0;
    // Model -c / (eps ln(-eps)), c by relative least squares, and the
    // largest relative misfit over the last decade.
    double log_model_prefactor = 0.0;
    double log_model_residual = 0.0;
};

/// eps = -10^(-m/4), m = m_first..m_last.
std::vector<double> default_epsilon_grid(int m_first = 4, int m_last = 28);

/// d u_hat/dx (T + eps, 0) for f = (1+x^2)^k and u0 = alpha x, T = -1/alpha.
/// Points are evaluated in parallel; a failing point is recorded and
/// skipped by the fits.
BlowupScanResult blowup_scan(double k, double alpha, const NoiseModel& noise,
                             const std::vector<double>& epsilon_grid, const CondMeanOptions& opts = {});

}  // namespace gradstorm
