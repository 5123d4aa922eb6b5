#include "gradstorm/roots.hpp"

#include <algorithm>
#include <utility>

namespace gradstorm {

double polish_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                   double a, double b, double rel_tol) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa > 0.0) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    // Invariant: f(a) < 0 < f(b).
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0)
            a = x;
        else
            b = x;
        const double width = std::abs(b - a);
        if (width <= rel_tol * std::max(1.0, std::abs(x))) return 0.5 * (a + b);
        const double d = df(x);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (a + b);
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        if (!(next > lo && next < hi)) next = 0.5 * (a + b);
        if (std::abs(next - x) <= 0.25 * rel_tol * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

std::vector<double> bracket_roots_on(const std::function<double(double)>& f,
                                     const std::function<double(double)>& df, std::vector<double> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<double> roots;
    if (points.empty()) return roots;
    double prev_x = points.front();
    double prev_f = f(prev_x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double x = points[i];
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (prev_f != 0.0 && std::signbit(fx) != std::signbit(prev_f)) {
            roots.push_back(polish_root(f, df, prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    return roots;
}

std::vector<double> bracket_roots(const std::function<double(double)>& f,
                                  const std::function<double(double)>& df, double lo, double hi,
                                  int n) {
    std::vector<double> points;
    for (int i = 0; i <= n; ++i) points.push_back(lo + (hi - lo) * i / n);
    return bracket_roots_on(f, df, std::move(points));
}

}  // namespace gradstorm
