#include "gradstorm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gradstorm/errors.hpp"
#include "peaks.hpp"

namespace gradstorm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLimitStep = 1e-6;

bool is_nonpositive_integer(double z) {
    return z <= 0.0 && std::abs(z - std::round(z)) < 1e-12;
}

bool near_half_integer_grid(double k) {
    const double twice = 2.0 * k;
    return std::abs(twice - std::round(twice)) < 1e-9;
}

double gamma_checked(double z, const char* name) {
    if (is_nonpositive_integer(z)) throw PoleError(std::string("Gamma pole in ") + name, name);
    return std::tgamma(z);
}

struct RawCoefficients {
    double a1, a2, a3, a4;
};

RawCoefficients evaluate_direct(double k, double alpha, double sigma) {
    const double aa = std::abs(alpha);
    const double cos_pk = std::cos(kPi * k);
    const double tan_pk = std::tan(kPi * k);
    const double lag_first = laguerre_at_zero(k, -k + 0.5);
    const double lag_second = laguerre_at_zero(0.5, k + 0.5);
    const double scale = std::pow(2.0, k) * std::pow(sigma, 2.0 * k) /
                         (std::pow(3.0, k) * std::pow(aa, 5.0 * k + 1.0));

    RawCoefficients c{};
    c.a1 = kPi * kPi * 4.0 * scale * (4.0 * k * k - 1.0) / cos_pk * gamma_checked(k + 1.0, "Gamma(k+1)") *
           lag_first;
    c.a2 = 3.0 * std::sqrt(6.0) * std::pow(kPi * aa, 2.5) / (2.0 * sigma * (k + 1.0)) * tan_pk * lag_second;
    c.a3 = kPi * kPi * 2.0 * scale * (2.0 * k - 1.0) / ((k + 1.0) * (k + 2.0) * cos_pk) *
           gamma_checked(k + 3.0, "Gamma(k+3)") * lag_first;
    c.a4 = std::sqrt(6.0) * kPi * kPi * std::pow(aa, 1.5) * (2.0 * k + 3.0) *
           gamma_checked(k + 3.0, "Gamma(k+3)") /
           (sigma * (k + 1.0) * (k + 2.0) * gamma_checked(k + 2.5, "Gamma(k+5/2)")) * tan_pk;
    return c;
}

std::vector<std::string> singular_factors_at(double k) {
    std::vector<std::string> out;
    const bool integer = std::abs(k - std::round(k)) < 1e-9;
    const bool half = !integer && near_half_integer_grid(k);
    if (half) {
        out.emplace_back("cos(pi k) = 0");
        out.emplace_back("tan(pi k) pole");
    }
    if (integer) out.emplace_back("tan(pi k) = 0");
    if (integer && k <= -1.0) out.emplace_back("Gamma(k+1) pole");
    if (integer && k <= -3.0) out.emplace_back("Gamma(k+3) pole");
    if (half && k <= -2.5) out.emplace_back("Gamma(k+5/2) pole");
    if (half && k >= 1.5) out.emplace_back("Gamma(3/2-k) pole in L(k,-k+1/2,0)");
    if (half && k <= -1.5) out.emplace_back("Gamma(k+3/2) pole in L(1/2,k+1/2,0)");
    if (integer && k <= -2.0) out.emplace_back("Gamma(k+2) pole in L(1/2,k+1/2,0)");
    if (std::abs(k + 1.0) < 1e-9) out.emplace_back("1/(k+1)");
    if (std::abs(k + 2.0) < 1e-9) out.emplace_back("1/(k+2)");
    if (std::abs(k - 0.5) < 1e-9) out.emplace_back("2k-1 = 0");
    if (std::abs(k + 0.5) < 1e-9) out.emplace_back("4k^2-1 = 0");
    return out;
}

std::string format_real(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

double laguerre_at_zero(double nu, double beta) {
    const double top = nu + beta + 1.0;
    if (is_nonpositive_integer(top)) throw PoleError("Gamma pole at nu+beta+1", "Gamma(nu+beta+1)");
    if (is_nonpositive_integer(nu + 1.0)) throw PoleError("Gamma pole at nu+1", "Gamma(nu+1)");
    if (is_nonpositive_integer(beta + 1.0)) throw PoleError("Gamma pole at beta+1", "Gamma(beta+1)");
    return std::tgamma(top) / (std::tgamma(nu + 1.0) * std::tgamma(beta + 1.0));
}

double b4_limit_slope(double alpha, double sigma) {
    const double aa = std::abs(alpha);
    return 1.5 * aa - std::sqrt(6.0) * std::pow(aa, 2.5) / (sigma * std::sqrt(kPi));
}

CoefficientSet coefficients(double k, double alpha, double sigma) {
    if (!(alpha < 0.0)) throw InvalidArgument("coefficients need alpha < 0");
    if (!(sigma > 0.0)) throw InvalidArgument("coefficients need sigma > 0");
    CoefficientSet out;
    out.k = k;
    out.alpha = alpha;
    out.sigma = sigma;
    out.abar1 = 4.0 * std::sqrt(6.0) * std::pow(kPi * std::abs(alpha), 1.5) / sigma;
    out.a5 = -out.abar1;

    if (!near_half_integer_grid(k)) {
        const auto c = evaluate_direct(k, alpha, sigma);
        out.a1 = c.a1;
        out.a2 = c.a2;
        out.a3 = c.a3;
        out.a4 = c.a4;
        out.a2_over_a4 = c.a2 / c.a4;
        out.a1_over_a4 = c.a1 / c.a4;
        out.a1_over_a3 = c.a1 / c.a3;
        return out;
    }

    out.limit_used = true;
    out.singular_factors = singular_factors_at(k);
    const auto lo = evaluate_direct(k - kLimitStep, alpha, sigma);
    const auto hi = evaluate_direct(k + kLimitStep, alpha, sigma);
    out.a1 = 0.5 * (lo.a1 + hi.a1);
    out.a2 = 0.5 * (lo.a2 + hi.a2);
    out.a3 = 0.5 * (lo.a3 + hi.a3);
    out.a4 = 0.5 * (lo.a4 + hi.a4);
    out.a2_over_a4 = 0.5 * (lo.a2 / lo.a4 + hi.a2 / hi.a4);
    out.a1_over_a4 = 0.5 * (lo.a1 / lo.a4 + hi.a1 / hi.a4);
    out.a1_over_a3 = 0.5 * (lo.a1 / lo.a3 + hi.a1 / hi.a3);
    return out;
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Suppressed: return "suppressed";
        case Regime::Algebraic: return "algebraic";
        case Regime::LogCorrected: return "log-corrected";
        case Regime::LinearRate: return "linear-rate";
    }
    return "unknown";
}

RegimeReport classify_regime(double k, double alpha, double sigma) {
    RegimeReport out;
    out.k = k;
    out.alpha = alpha;
    out.sigma = sigma;
    out.coefficients = coefficients(k, alpha, sigma);
    const auto& c = out.coefficients;
    constexpr double kTie = 1e-12;

    if (std::abs(k + 1.0) <= kTie) {
        out.regime = Regime::Suppressed;
        out.limit_slope = b4_limit_slope(alpha, sigma);
        out.exponent = 0.0;
        out.predicted_rate_description =
            "bounded: du/dx(T,0) -> B4 = 3|alpha|/2 - sqrt(6)|alpha|^(5/2)/(sigma sqrt(pi)) = " +
            format_real(*out.limit_slope);
    } else if (k < -1.0) {
        out.regime = Regime::Suppressed;
        out.limit_slope = c.a2_over_a4;
        out.exponent = 0.0;
        out.predicted_rate_description = "bounded: du/dx(T,0) -> B1 = A2/A4 = " + format_real(*out.limit_slope);
    } else if (std::abs(k + 0.5) <= kTie) {
        out.regime = Regime::LogCorrected;
        out.exponent = 1.0;
        out.prefactor = 1.0;
        out.predicted_rate_description = "du/dx(t,0) ~ -1/(eps ln(-eps))";
    } else if (k < -0.5) {
        out.regime = Regime::Algebraic;
        out.exponent = 2.0 * k + 2.0;
        out.prefactor = c.a1_over_a4;
        out.predicted_rate_description = "du/dx(t,0) ~ B2 / eps^(2k+2), exponent " +
                                         format_real(out.exponent) + ", B2 = A1/A4 = " +
                                         format_real(*out.prefactor);
    } else {
        out.regime = Regime::LinearRate;
        out.exponent = 1.0;
        out.prefactor = 2.0 * k + 1.0;
        out.coefficient_ratio_b3 = c.a1_over_a3;
        out.predicted_rate_description = "du/dx(t,0) ~ B3 / eps, B3 = 2k+1 = " + format_real(*out.prefactor) +
                                         " (A1/A3 = " + format_real(c.a1_over_a3) + ")";
    }
    return out;
}

Theorem1Slope theorem1_slope(double beta, const VelocityProfile& v, const DensityProfile& f,
                             double sigma, const quad::Tolerance& tol) {
    if (!(beta < 0.0)) throw InvalidArgument("theorem1_slope needs beta < 0");
    if (!(sigma > 0.0)) throw InvalidArgument("theorem1_slope needs sigma > 0");
    const double scale = 3.0 * beta / (2.0 * sigma * sigma);  // exponent is scale (u0 - beta s)^2
    const double s2 = sigma * sigma;

    const auto peaks = detail::line_peaks(v, beta, scale);
    const auto breaks = detail::core_breaks(peaks, f);
    auto log_weight = [&](double s) {
        const double d = v(s) - beta * s;
        return f.log_eval(s) + scale * d * d;
    };
    const double shift = detail::refined_log_max(log_weight, breaks, -std::numeric_limits<double>::infinity(),
                                                 std::numeric_limits<double>::infinity());

    auto integrand = [&](double s) {
        const double u0 = v(s);
        const double e = std::exp(log_weight(s) - shift);
        // s2 - 4 beta^2 s u0 + 3 beta^3 s^2 + beta u0^2, rewritten in d = u0 - beta s
        // so the s^2 terms cancel exactly instead of in rounding.
        const double d = u0 - beta * s;
        const double quad_term = s2 - 2.0 * beta * beta * s * d + beta * d * d;
        return quad::Vec<5>{e, (3.0 * beta * s - u0) * e, (beta * s - u0) * e, quad_term * e,
                            (3.0 * beta * s + u0) * e};
    };
    const auto est = quad::integrate_line<5>(integrand, breaks, -std::numeric_limits<double>::infinity(),
                                             std::numeric_limits<double>::infinity(), tol);
    const double D = est.value[0];
    if (!(D > 0.0)) throw NonConvergent("theorem1_slope weight integral vanished", std::abs(D));
    const double mean_outer = est.value[1] / D;  // <3 beta s - u0>
    const double mean_inner = est.value[2] / D;  // <beta s - u0>
    const double mean_quad = est.value[3] / D;
    const double mean_plus = est.value[4] / D;   // <3 beta s + u0>

    Theorem1Slope out;
    const double lead = -3.0 * beta / (2.0 * s2);
    out.value = lead * (mean_quad - beta * mean_outer * mean_inner);
    out.constant_term = 0.5 * mean_outer;
    out.printed_value = lead * (mean_quad + mean_inner * mean_outer);
    out.printed_constant_term = 0.5 * mean_plus;
    return out;
}

double linear_data_slope(double alpha, double beta, const DensityProfile& f, double sigma,
                         const quad::Tolerance& tol) {
    if (!(beta < 0.0)) throw InvalidArgument("linear_data_slope needs beta < 0");
    if (!f.is_even()) throw InvalidArgument("linear_data_slope needs an even density");
    const double s2 = sigma * sigma;
    const double curvature = 3.0 * beta * (beta - alpha) * (beta - alpha) / (2.0 * s2);
    const double coeff = beta * (alpha - beta) * (alpha - 3.0 * beta);

    std::vector<double> breaks = {0.0};
    if (curvature < 0.0) {
        const double width = 1.0 / std::sqrt(-2.0 * curvature);
        for (double m : {0.5, 1.0, 2.0, 4.0, 8.0, 12.0}) breaks.push_back(m * width);
    }
    for (double step = 0.125; step <= 64.0; step *= 2.0) breaks.push_back(step);
    auto integrand = [&](double s) {
        const double e = std::exp(f.log_eval(s) + curvature * s * s);
        return quad::Vec<2>{e, (s2 + coeff * s * s) * e};
    };
    const auto est = quad::integrate_line<2>(integrand, breaks, 0.0,
                                             std::numeric_limits<double>::infinity(), tol);
    return -3.0 * beta / (2.0 * s2) * est.value[1] / est.value[0];
}

}  // namespace gradstorm
