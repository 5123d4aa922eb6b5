#pragma once

// Adaptive Gauss-Kronrod 10/21-point integration of vector-valued integrands.
// All components share the same abscissae so one call of the integrand feeds
// every moment of a ratio such as N/D.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "gradstorm/errors.hpp"

namespace gradstorm::quad {

struct Tolerance {
    double abs = 1e-12;
    double rel = 1e-10;
    int max_subdivisions = 20000;
    // Doubling shells allowed beyond the breakpoints on an unbounded side.
    int max_shells = 240;
};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct Estimate {
    Vec<N> value{};
    Vec<N> error{};
    Vec<N> magnitude{};  // integral of |f_c|, the scale for relative tolerance
    long evaluations = 0;
};

namespace detail {

// Kronrod 21-point abscissae and weights (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600365755379, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss 10-point weights, paired with kXgk[1], kXgk[3], ...
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct Segment {
    double a = 0.0;
    double b = 0.0;
    Vec<N> value{};
    Vec<N> error{};
    Vec<N> magnitude{};
    double priority = 0.0;
};

template <std::size_t N, class F>
Segment<N> gk21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);

    Segment<N> seg;
    seg.a = a;
    seg.b = b;

    std::array<Vec<N>, 21> fv;
    fv[0] = f(center);
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        fv[1 + 2 * j] = f(center - dx);
        fv[2 + 2 * j] = f(center + dx);
    }

    for (std::size_t c = 0; c < N; ++c) {
        double rk = kWgk[10] * fv[0][c];
        double rg = 0.0;
        double ra = std::abs(rk);
        for (std::size_t j = 0; j < 10; ++j) {
            const double lo = fv[1 + 2 * j][c];
            const double hi = fv[2 + 2 * j][c];
            rk += kWgk[j] * (lo + hi);
            ra += kWgk[j] * (std::abs(lo) + std::abs(hi));
            if (j % 2 == 1) rg += kWg[j / 2] * (lo + hi);
        }
        const double mean = 0.5 * rk;
        double rasc = kWgk[10] * std::abs(fv[0][c] - mean);
        for (std::size_t j = 0; j < 10; ++j)
            rasc += kWgk[j] * (std::abs(fv[1 + 2 * j][c] - mean) + std::abs(fv[2 + 2 * j][c] - mean));

        double err = std::abs((rk - rg) * half);
        rasc *= abs_half;
        if (rasc != 0.0 && err != 0.0)
            err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
        const double mag = ra * abs_half;
        constexpr double eps = std::numeric_limits<double>::epsilon();
        if (mag > std::numeric_limits<double>::min() / (50.0 * eps))
            err = std::max(err, 50.0 * eps * mag);

        seg.value[c] = rk * half;
        seg.error[c] = err;
        seg.magnitude[c] = mag;
    }
    return seg;
}

template <std::size_t N>
Vec<N> targets(const Tolerance& tol, const Vec<N>& magnitude, const Vec<N>* scale) {
    Vec<N> out{};
    for (std::size_t c = 0; c < N; ++c) {
        double m = magnitude[c];
        if (scale) m = std::max(m, (*scale)[c]);
        out[c] = std::max(tol.abs, tol.rel * m);
    }
    return out;
}

template <std::size_t N>
double normalized_error(const Vec<N>& err, const Vec<N>& target) {
    double worst = 0.0;
    for (std::size_t c = 0; c < N; ++c) worst = std::max(worst, err[c] / target[c]);
    return worst;
}

}  // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], starting from the
/// subintervals the breakpoints define and bisecting the worst one until
/// every component meets max(abs, rel * scale). The scale of a component is
/// its own absolute integral, or `scale` when that is larger (used when the
/// piece is a small part of a bigger integral).
template <std::size_t N, class F>
Estimate<N> integrate(F&& f, std::span<const double> breaks, const Tolerance& tol = {},
                      const Vec<N>* scale = nullptr) {
    Estimate<N> out;
    if (breaks.size() < 2) return out;

    using Seg = detail::Segment<N>;
    auto cmp = [](const Seg& l, const Seg& r) { return l.priority < r.priority; };
    std::priority_queue<Seg, std::vector<Seg>, decltype(cmp)> heap(cmp);
    std::vector<Seg> exhausted;

    Vec<N> total{}, total_err{}, total_mag{};
    auto add = [&](const Seg& s, double sign) {
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += sign * s.value[c];
            total_err[c] += sign * s.error[c];
            total_mag[c] += sign * s.magnitude[c];
        }
    };

    std::vector<Seg> initial;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        initial.push_back(detail::gk21<N>(f, breaks[i], breaks[i + 1]));
        out.evaluations += 21;
        add(initial.back(), 1.0);
    }
    {
        const auto tgt = detail::targets<N>(tol, total_mag, scale);
        for (auto& s : initial) {
            s.priority = detail::normalized_error<N>(s.error, tgt);
            heap.push(s);
        }
    }

    int subdivisions = 0;
    while (true) {
        const auto tgt = detail::targets<N>(tol, total_mag, scale);
        bool done = true;
        for (std::size_t c = 0; c < N; ++c)
            if (total_err[c] > tgt[c]) done = false;
        if (done || heap.empty()) break;
        if (subdivisions >= tol.max_subdivisions) {
            throw NonConvergent("adaptive quadrature hit the subdivision limit",
                                detail::normalized_error<N>(total_err, tgt) * tol.rel);
        }

        Seg worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const double width = worst.b - worst.a;
        const double resolution =
            64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(worst.a), std::abs(worst.b));
        if (!(mid > worst.a && mid < worst.b) || width <= resolution) {
            exhausted.push_back(worst);
            continue;
        }
        add(worst, -1.0);
        Seg left = detail::gk21<N>(f, worst.a, mid);
        Seg right = detail::gk21<N>(f, mid, worst.b);
        out.evaluations += 42;
        add(left, 1.0);
        add(right, 1.0);
        left.priority = detail::normalized_error<N>(left.error, tgt);
        right.priority = detail::normalized_error<N>(right.error, tgt);
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Re-sum from the pieces so running-sum drift does not leak out.
    Vec<N> value{}, error{}, mag{};
    auto accumulate = [&](const Seg& s) {
        for (std::size_t c = 0; c < N; ++c) {
            value[c] += s.value[c];
            error[c] += s.error[c];
            mag[c] += s.magnitude[c];
        }
    };
    while (!heap.empty()) {
        accumulate(heap.top());
        heap.pop();
    }
    for (const auto& s : exhausted) accumulate(s);

    const auto tgt = detail::targets<N>(tol, mag, scale);
    for (std::size_t c = 0; c < N; ++c) {
        if (error[c] > tgt[c] && !exhausted.empty()) {
            throw NonConvergent("adaptive quadrature reached floating-point resolution",
                                detail::normalized_error<N>(error, tgt) * tol.rel);
        }
    }
    out.value = value;
    out.error = error;
    out.magnitude = mag;
    return out;
}

/// Integrates f over [lo, hi] where either end may be infinite. The finite
/// breakpoints (clipped to [lo, hi]) form the core; unbounded sides are
/// covered by doubling shells until two consecutive shells are negligible.
/// A tail that keeps contributing raises DivergentIntegral.
template <std::size_t N, class F>
Estimate<N> integrate_line(F&& f, std::vector<double> breaks, double lo, double hi,
                           const Tolerance& tol = {}) {
    std::erase_if(breaks, [&](double b) { return !std::isfinite(b) || b <= lo || b >= hi; });
    if (std::isfinite(lo)) breaks.push_back(lo);
    if (std::isfinite(hi)) breaks.push_back(hi);
    if (breaks.empty()) breaks.push_back(0.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    if (breaks.size() == 1) {
        // Unbounded on both sides with a single anchor: seed a unit core.
        breaks = {breaks[0] - 1.0, breaks[0], breaks[0] + 1.0};
    }

    Estimate<N> out = integrate<N>(f, breaks, tol);

    const double core_lo = breaks.front();
    const double core_hi = breaks.back();
    const double unit = std::max(1.0, 0.5 * (core_hi - core_lo));

    auto shells = [&](double start, double limit, double direction) {
        int quiet = 0;
        double reach = 0.0;
        for (int j = 0; j < tol.max_shells; ++j) {
            const double next_reach = reach == 0.0 ? unit : 2.0 * reach;
            double a = start + direction * reach;
            double b = start + direction * next_reach;
            bool last = false;
            if (direction > 0 ? b >= limit : b <= limit) {
                b = limit;
                last = true;
            }
            if (!std::isfinite(b)) break;
            std::array<double, 3> piece = {std::min(a, b), 0.5 * (a + b), std::max(a, b)};
            const auto shell = integrate<N>(f, piece, tol, &out.magnitude);
            out.evaluations += shell.evaluations;
            const auto tgt = detail::targets<N>(tol, out.magnitude, nullptr);
            bool negligible = true;
            for (std::size_t c = 0; c < N; ++c) {
                if (!std::isfinite(shell.value[c]))
                    throw DivergentIntegral("integrand overflows in the tail near " + std::to_string(b));
                out.value[c] += shell.value[c];
                out.error[c] += shell.error[c];
                out.magnitude[c] += shell.magnitude[c];
                if (shell.magnitude[c] > tgt[c]) negligible = false;
            }
            if (last) return;
            quiet = negligible ? quiet + 1 : 0;
            if (quiet >= 2) return;
            reach = next_reach;
        }
        throw DivergentIntegral("integrand tail does not decay beyond " +
                                std::to_string(start + direction * reach));
    };

    if (hi > core_hi) shells(core_hi, hi, 1.0);
    if (lo < core_lo) shells(core_lo, lo, -1.0);
    return out;
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(F&& f, std::span<const double> breaks, const Tolerance& tol = {}) {
    auto g = [&](double s) { return Vec<1>{f(s)}; };
    return integrate<1>(g, breaks, tol).value[0];
}

}  // namespace gradstorm::quad
