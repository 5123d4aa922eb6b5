#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace gradstorm {

/// Safeguarded Newton on a sign-changing bracket [a, b]: Newton steps that
/// leave the bracket or stall fall back to bisection.
double polish_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                   double a, double b, double rel_tol = 1e-14);

/// All sign changes of f on n equal sub-brackets of [lo, hi], polished.
/// Roots where f touches zero without changing sign are not reported.
std::vector<double> bracket_roots(const std::function<double(double)>& f,
                                  const std::function<double(double)>& df, double lo, double hi,
                                  int n);

/// Same scan over an arbitrary set of points (sorted internally).
std::vector<double> bracket_roots_on(const std::function<double(double)>& f,
                                     const std::function<double(double)>& df, std::vector<double> points);

}  // namespace gradstorm
