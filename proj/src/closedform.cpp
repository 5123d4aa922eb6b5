#include "gradstorm/closedform.hpp"

#include <cmath>
#include <string>

#include "gradstorm/errors.hpp"

namespace gradstorm::closedform {

double burgers_linear(double alpha, double t, double x) {
    const double c = 1.0 + alpha * t;
    if (c == 0.0) throw SingularTime("1 + alpha t vanishes at t = " + std::to_string(t));
    return alpha * x / c;
}

double uniform_mean(double alpha, double t, double x) { return burgers_linear(alpha, t, x); }

double gaussian_slope(double alpha, double r, double sigma, double t) {
    if (!(r > 0.0) || !(sigma > 0.0) || !(t >= 0.0))
        throw InvalidArgument("gaussian_mean needs r > 0, sigma > 0, t >= 0");
    const double c = alpha * t + 1.0;
    const double rs2 = r * r * sigma * sigma;
    return 3.0 * (alpha * c + rs2 * t * t) / (3.0 * c * c + 2.0 * rs2 * t * t * t);
}

double gaussian_mean(double alpha, double r, double sigma, double t, double x) {
    return gaussian_slope(alpha, r, sigma, t) * x;
}

}  // namespace gradstorm::closedform
