#pragma once

#include <span>

namespace gradstorm {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct PowerFit {
    double exponent = 0.0;   // y ~ prefactor * x^exponent
    double prefactor = 0.0;  // carries the common sign of y
    double rms_log_residual = 0.0;
};

/// Fits log|y| against log x (x > 0). All y must share one sign.
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace gradstorm
