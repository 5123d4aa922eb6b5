#pragma once

// Initial data of the Langevin-perturbed Burgers problem: the velocity
// profile u0(x), the particle density f(x) and the noise amplitude.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace gradstorm {

using RealFn = std::function<double(double)>;

struct LinearVelocity {
    double alpha = 0.0;
};

struct CustomVelocity {
    RealFn u0;
    RealFn du0;
    bool odd = false;
    std::string label = "custom";
};

class VelocityProfile {
  public:
    static VelocityProfile linear(double alpha);
    /// du0 is trusted, not differenced; see check_derivative().
    static VelocityProfile custom(RealFn u0, RealFn du0, bool odd, std::string label = "custom");

    double operator()(double x) const;
    double derivative(double x) const;
    bool is_odd() const;
    bool is_linear() const { return std::holds_alternative<LinearVelocity>(kind_); }
    /// Slope of the linear profile; nullopt for custom data.
    std::optional<double> linear_slope() const;
    std::string describe() const;

    const std::variant<LinearVelocity, CustomVelocity>& kind() const { return kind_; }

  private:
    explicit VelocityProfile(std::variant<LinearVelocity, CustomVelocity> k) : kind_(std::move(k)) {}
    std::variant<LinearVelocity, CustomVelocity> kind_;
};

struct UniformDensity {};
struct GaussianDensity {
    double r = 1.0;
};
struct PowerLawDensity {
    double k = 0.0;
};
struct CustomDensity {
    RealFn f;
    bool even = false;
    bool normalizable = true;
    // Upper bound of f used by rejection sampling.
    double envelope = std::numeric_limits<double>::infinity();
    std::string label = "custom";
};

/// Initial particle density. Gaussian is normalized, (r/sqrt(pi)) e^{-r^2 x^2};
/// Uniform is 1 and PowerLaw is (1+x^2)^k, both left unnormalized because
/// every consumer forms ratios in which the constant cancels.
class DensityProfile {
  public:
    static DensityProfile uniform();
    static DensityProfile gaussian(double r);
    static DensityProfile power_law(double k);
    static DensityProfile custom(RealFn f, bool even, bool normalizable, double envelope,
                                 std::string label = "custom");

    double operator()(double x) const;
    /// log f(x); -inf where f vanishes.
    double log_eval(double x) const;
    bool normalizable() const;
    bool is_even() const;
    std::string describe() const;

    const std::variant<UniformDensity, GaussianDensity, PowerLawDensity, CustomDensity>& kind() const {
        return kind_;
    }

  private:
    using Kind = std::variant<UniformDensity, GaussianDensity, PowerLawDensity, CustomDensity>;
    explicit DensityProfile(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

class NoiseModel {
  public:
    explicit NoiseModel(double sigma);
    double sigma() const { return sigma_; }

  private:
    double sigma_;
};

struct ProbeGrid {
    double lo = -50.0;
    double hi = 50.0;
    int points = 4096;

    double at(int i) const { return lo + (hi - lo) * i / (points - 1); }
};

/// Time at which characteristics of u0 first cross: -1/min u0' when the
/// minimum slope is negative, +inf otherwise. Exact for linear data; for
/// custom data the minimum is taken over the probe grid, so the answer
/// depends on the probed interval.
double blowup_time(const VelocityProfile& v, const ProbeGrid& grid = {});

/// Largest relative mismatch between du0 and a central difference of u0
/// over the grid.
double check_derivative(const VelocityProfile& v, const ProbeGrid& grid = {});

/// Diagnostic for the separation hypothesis |u0(x) - beta x| >= gamma
/// outside |x| <= radius: returns the smallest separation seen on the grid
/// beyond that radius.
double separation_from_line(const VelocityProfile& v, double beta, double radius,
                            const ProbeGrid& grid = {});

/// "linear:-1", "tanh:-1" (alpha*tanh x), "cubic:-1" (c*x^3).
VelocityProfile parse_velocity(std::string_view spec);
/// "uniform", "gaussian:1", "powerlaw:-2".
DensityProfile parse_density(std::string_view spec);

}  // namespace gradstorm
