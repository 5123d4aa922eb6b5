#pragma once

// Asymptotics of the conditional mean near the critical time:
//  * the slope at the origin at t0 = -1/beta for general data (a Taylor
//    coefficient expressed through weighted moments), and
//  * for f = (1+x^2)^k, u0 = alpha x, the printed leading-order coefficients
//    A1..A5 of the numerator and denominator, the blowup rates B1..B4 and the
//    regime they imply.

#include <optional>
#include <string>
#include <vector>

#include "gradstorm/profiles.hpp"
#include "gradstorm/quadrature.hpp"

namespace gradstorm {

/// Generalized Laguerre function L(nu, beta, 0) = Gamma(nu+beta+1) /
/// (Gamma(nu+1) Gamma(beta+1)). PoleError when any Gamma argument is a
/// nonpositive integer.
double laguerre_at_zero(double nu, double beta);

struct CoefficientSet {
    double k = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    // Printed value at k = -1/2 and A5 = -Abar1 (reported for every k).
    double abar1 = 0.0;
    double a5 = 0.0;
    // Ratios, taken side by side when the limit procedure is used.
    double a2_over_a4 = 0.0;  // B1
    double a1_over_a4 = 0.0;  // B2
    double a1_over_a3 = 0.0;  // candidate B3
    // Set when k sits on a zero or pole of a factor and every value is the
    // mean of evaluations at k -+ 1e-6.
    bool limit_used = false;
    std::vector<std::string> singular_factors;
};

/// Direct evaluation of the printed A1..A4 (with the k -+ 1e-6 average on
/// integer and half-integer k).
CoefficientSet coefficients(double k, double alpha, double sigma);

/// 3|alpha|/2 - sqrt(6)|alpha|^{5/2} / (sigma sqrt(pi)), the k = -1 limit slope.
double b4_limit_slope(double alpha, double sigma);

enum class Regime { Suppressed, Algebraic, LogCorrected, LinearRate };

std::string_view to_string(Regime regime) noexcept;

struct RegimeReport {
    double k = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    Regime regime = Regime::Suppressed;
    // Suppressed: the finite limit slope (B1 for k < -1, B4 at k = -1).
    std::optional<double> limit_slope;
    // Blowup exponent p in |du/dx| ~ C |eps|^-p (0 when suppressed; 1 for
    // the log-corrected and linear regimes).
    double exponent = 0.0;
    // Algebraic: B2. LogCorrected: 1 (the model -1/(eps ln(-eps))).
    // LinearRate: the printed B3 = 2k + 1.
    std::optional<double> prefactor;
    // LinearRate only: A1/A3 from the printed coefficients.
    std::optional<double> coefficient_ratio_b3;
    std::string predicted_rate_description;
    CoefficientSet coefficients;
};

/// k < -1 suppressed (B1); k = -1 suppressed (B4); -1 < k < -1/2 algebraic
/// eps^{-(2k+2)} (B2); k = -1/2 log-corrected; k > -1/2 linear 1/eps (B3).
RegimeReport classify_regime(double k, double alpha, double sigma);

struct Theorem1Slope {
    // Derivative of u_hat at x = 0, t0 = -1/beta:
    //   -(3 beta / 2 sigma^2) [ sigma^2 + <3 beta^3 s^2 - 4 beta^2 s u0 + beta u0^2>
    //                           - beta <3 beta s - u0> <beta s - u0> ]
    // with <.> the average against f(s) exp(3 beta^3 (u0/beta - s)^2 / 2 sigma^2).
    double value = 0.0;
    // u_hat(t0, 0) = <3 beta s - u0> / 2.
    double constant_term = 0.0;
    // The same expansion with the cross term as +<beta s - u0><3 beta s - u0>
    // and the constant as <3 beta s + u0>/2, as it is usually printed. Equal
    // to the above for even f and odd u0.
    double printed_value = 0.0;
    double printed_constant_term = 0.0;
};

/// Slope and constant term of u_hat at (t0 = -1/beta, x = 0). The moments
/// must exist; DivergentIntegral otherwise (e.g. beta = alpha for linear
/// data with a heavy-tailed f).
Theorem1Slope theorem1_slope(double beta, const VelocityProfile& v, const DensityProfile& f,
                             double sigma, const quad::Tolerance& tol = {});

/// Half-line closed expression for linear data u0 = alpha x and even f:
///   -(3 beta / 2 sigma^2) int_0^inf (sigma^2 + beta s^2 (alpha-beta)(alpha-3beta)) f E
///                         / int_0^inf f E,   E = exp(3 s^2 beta (beta-alpha)^2 / 2 sigma^2).
double linear_data_slope(double alpha, double beta, const DensityProfile& f, double sigma,
                         const quad::Tolerance& tol = {});

}  // namespace gradstorm
