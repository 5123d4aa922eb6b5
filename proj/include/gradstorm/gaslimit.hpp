#pragma once

// The vanishing-noise limit: v(t,x) = u0(s) with u0(s) + (s - x)/t = 0,
// the convergence u_hat -> v as sigma -> 0, the relaxation term
//   Lambda = -int P_x (u - u_hat)^2 du
// of the momentum balance d_t(rho u_hat) + d_x(rho u_hat^2) = Lambda, and
// finite-difference residuals tying (rho, u_hat) to the pressureless gas
// equations.

#include <vector>

#include "gradstorm/burgers.hpp"
#include "gradstorm/condmean.hpp"
#include "gradstorm/kernel.hpp"
#include "gradstorm/profiles.hpp"

namespace gradstorm {

struct VanishingNoiseValue {
    double value = 0.0;  // u0(s)
    double foot = 0.0;   // s(t, x)
    // 1 + t u0'(s) vanishes at the foot point (within 1e-12): the limit
    // exists but is not differentiable in x there.
    bool non_differentiable = false;
};

/// Throws MultiRootError past shock formation, NoRootError when the
/// bracketing finds nothing, InvalidArgument for t <= 0.
VanishingNoiseValue vanishing_noise_mean(const VelocityProfile& v, double t, double x,
                                         const CharacteristicOptions& opts = {});

struct SigmaErrorPoint {
    double sigma = 0.0;
    double u_hat = 0.0;
    double limit = 0.0;
    double error = 0.0;  // |u_hat - limit|
};

struct SigmaConvergence {
    std::vector<SigmaErrorPoint> points;
    // Nonincreasing after the first term, up to the 1e-8 quadrature floor.
    bool monotone = false;
    // log-log slope of error against sigma over the smaller half of the
    // sequence; NaN when fewer than two errors sit above the floor.
    double fitted_order = 0.0;
};

/// 2^0, 2^-1, ..., 2^-j_last.
std::vector<double> default_sigma_sequence(int j_last = 10);

SigmaConvergence sigma_convergence(const DensityProfile& f, const VelocityProfile& v, double t, double x,
                                   const std::vector<double>& sigma_seq, const CondMeanOptions& opts = {});

/// Lambda by nested quadrature: u outer, the s-integral of the analytic
/// x-derivative of the phase density inside. Uses f as given.
double lambda_term(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                   const NoiseModel& noise, const quad::Tolerance& tol = {1e-14, 1e-9, 20000, 240});

struct MomentumBalance {
    double time_derivative = 0.0;  // d_t(rho u_hat)
    double flux_derivative = 0.0;  // d_x(rho u_hat^2)
    double lambda = 0.0;
    double residual = 0.0;         // time + flux - lambda
    double normalized = 0.0;       // |residual| / max(|terms|, 1e-12)
};

/// Central differences with steps 1e-4 max(1,t) and 1e-4 max(1,|x|).
MomentumBalance momentum_balance(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                                 const NoiseModel& noise);

/// d_t rho + d_x(rho u_hat), same steps; normalized by
/// max(|d_t rho|, |d_x(rho u_hat)|, 1e-12).
ResidualReport continuity_residual(double t, double x, const DensityProfile& f, const VelocityProfile& v,
                                   const NoiseModel& noise);

/// v_t + v v_x for the vanishing-noise limit, same steps and normalization.
ResidualReport burgers_residual(const VelocityProfile& v, double t, double x);

/// int rho(t, x) dx.
double total_mass(double t, const DensityProfile& f, const VelocityProfile& v, const NoiseModel& noise);

struct KineticReport {
    // d_t P + u d_x P + d_u((2/t)(u_hat - u) P) and its size relative to the
    // largest of the three terms.
    double residual = 0.0;
    double normalized = 0.0;
    // (2/t)(u_hat - u) P: changes sign across u = u_hat.
    double flux = 0.0;
    double u_hat = 0.0;
    // The Fokker-Planck residual at the same point, for the joint report.
    double fokker_planck_normalized = 0.0;
    // The two closures side by side: (sigma^2/2) P_uu and -d_u((2/t)(u_hat-u)P).
    double diffusion_term = 0.0;
    double relaxation_term = 0.0;
};

/// Pointwise check of the kinetic form with particle acceleration
/// (2/t)(u_hat - u). The two closures share their zeroth and first velocity
/// moments (both give continuity and the same momentum flux), but not the
/// pointwise density, so `normalized` is generally O(1); see README.
KineticReport kinetic_acceleration_check(double t, double x, double u, const DensityProfile& f,
                                         const VelocityProfile& v, const NoiseModel& noise);

}  // namespace gradstorm
