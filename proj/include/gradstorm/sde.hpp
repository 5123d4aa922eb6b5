#pragma once

// Exact Monte Carlo for dX = U dt, dU = sigma dW started from X0 ~ f,
// U0 = u0(X0). The terminal pair is Gaussian given the start, so there is
// no time stepping: X_t = x0 + u0 t + G1, U_t = u0 + G2 with
//   G2 = sigma sqrt(t) Z1,  G1 = sigma t^{3/2} (Z1/2 + Z2/(2 sqrt 3)),
// which reproduces the covariance (sigma^2 t^3/3, sigma^2 t^2/2, sigma^2 t).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradstorm/kernel.hpp"
#include "gradstorm/profiles.hpp"
#include "gradstorm/rng.hpp"

namespace gradstorm {

PhasePoint sample_terminal(double t, double x0, double u0val, double sigma, SampleStream& rng);

/// Draws initial positions from f (or from f restricted to [-L, L]).
/// Uniform: uniform on [-L, L]. Gaussian(r): normal with sd 1/(r sqrt 2).
/// PowerLaw(k): inverse CDF in theta = atan x, where the density is
/// cos(theta)^(-2k-2); the CDF is tabulated on 4096 cells and inverted by
/// safeguarded Newton. Custom: rejection under the declared envelope.
class InitialSampler {
  public:
    /// L is required for Uniform, for Custom, and for PowerLaw with k > -1;
    /// a given L truncates the others too.
    InitialSampler(const DensityProfile& f, std::optional<double> L);

    double draw(SampleStream& rng) const;
    /// CDF of the law draw() samples from.
    double cdf(double x) const;
    std::optional<double> truncation() const { return L_; }

  private:
    double theta_cdf(double theta) const;
    double theta_density(double theta) const;

    DensityProfile f_;
    std::optional<double> L_;
    // PowerLaw table.
    double k_ = 0.0;
    double theta_max_ = 0.0;
    std::vector<double> cumulative_;  // cell edges, normalized to end at 1
    double cell_ = 0.0;
    double mass_ = 0.0;
};

double draw_initial(const DensityProfile& f, std::optional<double> L, SampleStream& rng);

struct McConfig {
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 0;
    // Bin width around each probe x; default max(sigma t^{3/2} / 2, range / 200).
    std::optional<double> bandwidth;
    // Truncation of f; see default_truncation.
    std::optional<double> L;
};

struct McEstimate {
    double x_center = 0.0;
    // Mean of X_t over the bin: the point a smooth u_hat should be compared at.
    double x_mean = 0.0;
    double u_hat_mc = 0.0;
    double std_error = 0.0;  // sample std / sqrt(count)
    std::uint64_t count_in_bin = 0;
    // count_in_bin > 30; otherwise the bin is reported as EmptyBin and the
    // other fields are NaN.
    bool reported = false;
};

/// 50 max(1, max|x| (1 + |slope| t)), slope = alpha for linear data and
/// max |u0'| on the default probe grid otherwise.
double default_truncation(const VelocityProfile& v, double t, std::span<const double> x_grid);

/// Bin width actually used for a grid.
double mc_bandwidth(double t, double sigma, std::span<const double> x_grid, const McConfig& cfg);

/// Sample i uses the stream (seed, i). Samples are processed in chunks of
/// 65536 whose per-bin statistics are merged in chunk order, so the result
/// does not depend on the number of workers.
std::vector<McEstimate> mc_conditional_mean(double t, std::span<const double> x_grid, const DensityProfile& f,
                                            const VelocityProfile& v, const NoiseModel& noise,
                                            const McConfig& cfg);

}  // namespace gradstorm
