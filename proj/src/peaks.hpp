#pragma once

// Breakpoint placement for integrals over the initial position s whose
// weight is exp(-3 (u0(s) t + s - x)^2 / (2 sigma^2 t^3)). Private to the
// library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gradstorm/profiles.hpp"

namespace gradstorm::detail {

struct WeightPeaks {
    std::vector<double> centers;
    // Width in s of each peak; +inf when 1 + t u0'(s) vanishes there.
    std::vector<double> widths;
};

/// Foot points of the characteristics through x and the Gaussian width of
/// the weight around each. Custom profiles without a foot point fall back to
/// the grid minimiser of |s + t u0(s) - x|.
WeightPeaks weight_peaks(const VelocityProfile& v, double t, double x, double sigma);

/// Peaks of exp(scale * (u0(s) - beta s)^2), scale < 0: roots of
/// u0(s) = beta s with their widths.
WeightPeaks line_peaks(const VelocityProfile& v, double beta, double scale);

/// Breakpoints resolving every peak (multiples of its width), the density's
/// own scale, and a geometric ladder +-2^j around the origin out to the
/// farthest finite peak edge.
std::vector<double> core_breaks(const WeightPeaks& peaks, const DensityProfile& f,
                                std::vector<double> extra_anchors = {});

/// Smallest interval that must lie inside a truncation window before its
/// truncated integrals can be trusted: max |center| + 12 width over finite
/// peaks.
double peak_extent(const WeightPeaks& peaks, double width_multiple = 12.0);

/// Largest value of logfn over the candidates in [lo, hi], refined by a
/// golden-section search between the neighbours of the best candidate. Used
/// as the log-space shift that keeps exp() of the integrands in range.
template <class LogFn>
double refined_log_max(LogFn&& logfn, std::vector<double> candidates, double lo, double hi) {
    for (double& c : candidates) c = std::clamp(c, lo, hi);
    // A density growing toward a finite cut peaks at the cut.
    if (std::isfinite(lo)) candidates.push_back(lo);
    if (std::isfinite(hi)) candidates.push_back(hi);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) return 0.0;
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double val = logfn(candidates[i]);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    if (!std::isfinite(best_val)) return 0.0;
    const double c = candidates[best];
    double a = best > 0 ? candidates[best - 1] : std::max(lo, c - (1.0 + std::abs(c)));
    double b = best + 1 < candidates.size() ? candidates[best + 1] : std::min(hi, c + (1.0 + std::abs(c)));
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
    double f1 = logfn(x1), f2 = logfn(x2);
    for (int it = 0; it < 100 && b - a > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = logfn(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = logfn(x1);
        }
    }
    const double refined = std::max(f1, f2);
    return std::isfinite(refined) ? std::max(best_val, refined) : best_val;
}

}  // namespace gradstorm::detail
