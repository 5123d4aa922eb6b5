#pragma once

// Unperturbed Burgers equation by characteristics: u(t,x) = u0(s) where
// s + t u0(s) = x.

#include <variant>
#include <vector>

#include "gradstorm/profiles.hpp"

namespace gradstorm {

struct CharacteristicOptions {
    ProbeGrid probe{};
    int brackets = 4096;
};

struct UniqueRoot {
    double u = 0.0;
    double s = 0.0;
};

/// Post-shock outcome. `roots` are the foot points found; `crossed` is set
/// when some root has a negative Jacobian 1 + t u0'(s), i.e. particle order
/// has already flipped (a linear profile past its blowup time has a single,
/// orientation-reversed root). `focused` marks the linear profile exactly at
/// blowup, where every characteristic passes through x = 0.
struct MultiRoot {
    int count = 0;
    std::vector<double> roots;
    bool crossed = false;
    bool focused = false;
};

struct NoRoot {};

using CharacteristicOutcome = std::variant<UniqueRoot, MultiRoot, NoRoot>;

/// Solves s + t u0(s) = x. Custom profiles are bracketed on 4096 cells of
/// [x - 10(1+|x|) - 10tU, x + 10(1+|x|) + 10tU], U = max |u0| on the probe
/// grid, and polished to ~1e-14 relative.
CharacteristicOutcome solve_characteristics(const VelocityProfile& v, double t, double x,
                                            const CharacteristicOptions& opts = {});

/// Every foot point s with s + t u0(s) = x found by the same bracketing.
std::vector<double> characteristic_roots(const VelocityProfile& v, double t, double x,
                                         const CharacteristicOptions& opts = {});

}  // namespace gradstorm
