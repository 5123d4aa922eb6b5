#include "gradstorm/fit.hpp"

#include <cmath>
#include <vector>

#include "gradstorm/errors.hpp"

namespace gradstorm {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("line fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("line fit needs two distinct abscissae");
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - out.intercept - out.slope * x[i];
        ss += r * r;
    }
    out.rms_residual = std::sqrt(ss / n);
    return out;
}

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw InvalidArgument("power fit size mismatch");
    const bool negative = y[0] < 0.0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || y[i] == 0.0 || (y[i] < 0.0) != negative)
            throw InvalidArgument("power fit needs x > 0 and y of one sign");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    const auto line = fit_line(lx, ly);
    PowerFit out;
    out.exponent = line.slope;
    out.prefactor = (negative ? -1.0 : 1.0) * std::exp(line.intercept);
    out.rms_log_residual = line.rms_residual;
    return out;
}

}  // namespace gradstorm
