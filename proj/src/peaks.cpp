#include "peaks.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "gradstorm/burgers.hpp"
#include "gradstorm/roots.hpp"

namespace gradstorm::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxLadder = 0x1.0p80;

}  // namespace

WeightPeaks weight_peaks(const VelocityProfile& v, double t, double x, double sigma) {
    WeightPeaks out;
    const double base = sigma * std::pow(t, 1.5) / std::sqrt(3.0);
    auto width_at = [&](double s) {
        const double jac = std::abs(1.0 + t * v.derivative(s));
        return jac > 0.0 ? base / jac : kInf;
    };

    std::vector<double> roots = characteristic_roots(v, t, x);
    if (roots.empty()) {
        if (v.is_linear()) {
            // 1 + alpha t = 0: the weight is flat in s.
            out.centers.push_back(0.0);
            out.widths.push_back(kInf);
            return out;
        }
        double best = 0.0;
        double best_gap = kInf;
        const ProbeGrid grid{};
        for (int i = 0; i < grid.points; ++i) {
            const double s = grid.at(i);
            const double gap = std::abs(s + t * v(s) - x);
            if (gap < best_gap) {
                best_gap = gap;
                best = s;
            }
        }
        roots.push_back(best);
    }
    for (double s : roots) {
        out.centers.push_back(s);
        out.widths.push_back(width_at(s));
    }
    return out;
}

WeightPeaks line_peaks(const VelocityProfile& v, double beta, double scale) {
    WeightPeaks out;
    const double curvature = std::sqrt(-2.0 * scale);
    auto width_at = [&](double s) {
        const double slope = std::abs(v.derivative(s) - beta);
        return slope > 0.0 ? 1.0 / (curvature * slope) : kInf;
    };
    std::vector<double> roots;
    if (v.is_linear()) {
        roots.push_back(0.0);
    } else {
        const ProbeGrid grid{};
        auto g = [&](double s) { return v(s) - beta * s; };
        auto dg = [&](double s) { return v.derivative(s) - beta; };
        roots = bracket_roots(g, dg, grid.lo, grid.hi, grid.points);
        if (roots.empty()) roots.push_back(0.0);
    }
    for (double s : roots) {
        out.centers.push_back(s);
        out.widths.push_back(width_at(s));
    }
    return out;
}

double peak_extent(const WeightPeaks& peaks, double width_multiple) {
    double extent = 0.0;
    for (std::size_t i = 0; i < peaks.centers.size(); ++i) {
        if (!std::isfinite(peaks.widths[i])) continue;
        extent = std::max(extent, std::abs(peaks.centers[i]) + width_multiple * peaks.widths[i]);
    }
    return extent;
}

std::vector<double> core_breaks(const WeightPeaks& peaks, const DensityProfile& f,
                                std::vector<double> extra_anchors) {
    static constexpr double kMultiples[] = {0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
    std::vector<double> breaks = std::move(extra_anchors);
    breaks.push_back(0.0);

    double extent = 4.0;
    for (std::size_t i = 0; i < peaks.centers.size(); ++i) {
        const double c = peaks.centers[i];
        const double w = peaks.widths[i];
        breaks.push_back(c);
        if (!std::isfinite(w) || w > kMaxLadder) continue;
        for (double m : kMultiples) {
            breaks.push_back(c - m * w);
            breaks.push_back(c + m * w);
        }
        extent = std::max(extent, std::abs(c) + 16.0 * w);
    }
    extent = std::min(extent, kMaxLadder);

    if (const auto* g = std::get_if<GaussianDensity>(&f.kind())) {
        for (double m : {0.5, 1.0, 2.0, 4.0, 6.0, 8.0}) {
            breaks.push_back(-m / g->r);
            breaks.push_back(m / g->r);
        }
    }

    for (double step = 0.125; step <= 2.0 * extent; step *= 2.0) {
        breaks.push_back(-step);
        breaks.push_back(step);
    }

    std::erase_if(breaks, [](double b) { return !std::isfinite(b); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

}  // namespace gradstorm::detail
