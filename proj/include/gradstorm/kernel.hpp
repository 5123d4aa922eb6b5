#pragma once

// Phase-space density of the Langevin system dX = U dt, dU = sigma dW.
//
// A particle started at (s, u0(s)) is at time t jointly Gaussian with mean
// (s + u0(s) t, u0(s)) and covariance
//     Var X = sigma^2 t^3 / 3,  Cov(X, U) = sigma^2 t^2 / 2,  Var U = sigma^2 t,
// which follows from X_t = s + u0 t + sigma int_0^t W, U_t = u0 + sigma W_t.
// The phase density is the f-weighted superposition of these kernels.

#include "gradstorm/profiles.hpp"
#include "gradstorm/quadrature.hpp"

namespace gradstorm {

struct PhasePoint {
    double x = 0.0;
    double u = 0.0;
};

class GaussianKernelParams {
  public:
    GaussianKernelParams(double t, double sigma);

    double t() const { return t_; }
    double sigma() const { return sigma_; }
    double var_x() const { return sigma_ * sigma_ * t_ * t_ * t_ / 3.0; }
    double var_u() const { return sigma_ * sigma_ * t_; }
    double cov_xu() const { return sigma_ * sigma_ * t_ * t_ / 2.0; }
    /// sigma^4 t^4 / 12
    double det() const { return var_x() * var_u() - cov_xu() * cov_xu(); }

  private:
    double t_;
    double sigma_;
};

/// Density at `end` of a particle started at (start.x, start.u); start.u is
/// the initial velocity u0(s).
double transition_density(const GaussianKernelParams& params, PhasePoint start, PhasePoint end);

/// Log of transition_density.
double log_transition_density(const GaussianKernelParams& params, PhasePoint start, PhasePoint end);

/// The exponent of the phase density written out term by term,
///   -2/(sigma^2 t^3) (3 t^2 u u0 + t^2 (u0 - u)^2 + 3 (x - s)^2 + 3 t (u + u0)(s - x)),
/// kept as an independent transcription to compare against the covariance
/// form above.
double expanded_exponent(double t, double sigma, double s, double u0s, PhasePoint end);

/// exp(-3 (u0 t + s - x)^2 / (2 sigma^2 t^3)): the s-weight left after
/// integrating the kernel over u, up to the factor sqrt(3 / (2 pi sigma^2 t^3)).
double position_weight(double t, double sigma, double s, double u0s, double x);

/// int transition_density du by quadrature over u (for the consistency check
/// against position_weight).
double kernel_velocity_marginal(const GaussianKernelParams& params, PhasePoint start, double x,
                                const quad::Tolerance& tol = {});

/// P(t, x, u) = int f(s) K(x, u | s, u0(s)) ds, for 1-D data. Uses f as
/// given (PowerLaw and Uniform are unnormalized).
double phase_density(double t, PhasePoint pp, const DensityProfile& f, const VelocityProfile& v,
                     const NoiseModel& noise, const quad::Tolerance& tol = {});

/// d/dx of phase_density, by differentiating the kernel exponent.
double phase_density_dx(double t, PhasePoint pp, const DensityProfile& f, const VelocityProfile& v,
                        const NoiseModel& noise, const quad::Tolerance& tol = {});

/// rho(t, x) = int P du = int f(s) sqrt(3/(2 pi sigma^2 t^3)) w(s) ds.
double marginal_density(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                        const NoiseModel& noise, const quad::Tolerance& tol = {});

struct ResidualReport {
    double residual = 0.0;     // raw value of the balance
    double normalized = 0.0;   // residual / max(|term|), floored at 1e-12
};

/// dP/dt + u dP/dx - (sigma^2/2) d2P/du2 by central differences (steps
/// 1e-4 scaled in t and x, 1e-3 scaled in u for the second derivative).
ResidualReport fokker_planck_residual(double t, PhasePoint pp, const DensityProfile& f,
                                      const VelocityProfile& v, const NoiseModel& noise);

}  // namespace gradstorm
