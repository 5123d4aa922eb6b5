#pragma once

// Exact reference values for linear initial data u0 = alpha x. All formulas
// are scalar; in n dimensions they apply componentwise with |x|^2 in place
// of x^2, so the 1-D versions are all the experiments need.

namespace gradstorm::closedform {

/// alpha x / (1 + alpha t). Throws SingularTime when 1 + alpha t = 0.
double burgers_linear(double alpha, double t, double x);

/// Conditional mean for a uniform particle density. Identical to
/// burgers_linear; the noise amplitude drops out entirely.
double uniform_mean(double alpha, double t, double x);

/// Conditional mean for the density (r/sqrt(pi)) e^{-r^2 x^2}:
///   3(alpha(alpha t + 1) + r^2 sigma^2 t^2) x / (3(alpha t + 1)^2 + 2 r^2 sigma^2 t^3).
/// The denominator is positive for every t >= 0.
double gaussian_mean(double alpha, double r, double sigma, double t, double x);

/// d/dx of gaussian_mean (it is linear in x).
double gaussian_slope(double alpha, double r, double sigma, double t);

}  // namespace gradstorm::closedform
