#include "gradstorm/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradstorm/errors.hpp"
#include "gradstorm/roots.hpp"

namespace gradstorm {

std::vector<double> characteristic_roots(const VelocityProfile& v, double t, double x,
                                         const CharacteristicOptions& opts) {
    if (!(t >= 0.0)) throw InvalidArgument("characteristics need t >= 0");
    if (const auto alpha = v.linear_slope()) {
        const double c = 1.0 + *alpha * t;
        if (c == 0.0) return {};
        return {x / c};
    }
    double umax = 0.0;
    for (int i = 0; i < opts.probe.points; ++i) umax = std::max(umax, std::abs(v(opts.probe.at(i))));
    const double reach = 10.0 * (1.0 + std::abs(x)) + 10.0 * t * umax;
    auto f = [&](double s) { return s + t * v(s) - x; };
    auto df = [&](double s) { return 1.0 + t * v.derivative(s); };
    // Uniform brackets over the whole reach, plus the probe grid where it
    // falls inside: a wide reach can otherwise put a whole fold in one cell.
    const double lo = x - reach, hi = x + reach;
    std::vector<double> points;
    for (int i = 0; i <= opts.brackets; ++i) points.push_back(lo + (hi - lo) * i / opts.brackets);
    for (int i = 0; i < opts.probe.points; ++i) {
        const double p = opts.probe.at(i);
        if (p > lo && p < hi) points.push_back(p);
    }
    return bracket_roots_on(f, df, std::move(points));
}

CharacteristicOutcome solve_characteristics(const VelocityProfile& v, double t, double x,
                                            const CharacteristicOptions& opts) {
    if (!(t >= 0.0)) throw InvalidArgument("characteristics need t >= 0");
    if (t == 0.0) return UniqueRoot{v(x), x};

    if (const auto alpha = v.linear_slope()) {
        const double c = 1.0 + *alpha * t;
        if (c == 0.0) {
            if (x == 0.0) return MultiRoot{0, {}, true, true};
            return NoRoot{};
        }
        const double s = x / c;
        if (c > 0.0) return UniqueRoot{v(s), s};
        return MultiRoot{1, {s}, true, false};
    }

    const auto roots = characteristic_roots(v, t, x, opts);
    if (roots.empty()) return NoRoot{};
    bool crossed = false;
    for (double s : roots)
        if (1.0 + t * v.derivative(s) < 0.0) crossed = true;
    if (roots.size() == 1 && !crossed) return UniqueRoot{v(roots[0]), roots[0]};
    return MultiRoot{static_cast<int>(roots.size()), roots, crossed, false};
}

}  // namespace gradstorm
