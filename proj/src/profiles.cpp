#include "gradstorm/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "gradstorm/errors.hpp"

namespace gradstorm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct ParsedSpec {
    std::string name;
    std::vector<double> params;
};

ParsedSpec split_spec(std::string_view spec) {
    ParsedSpec out;
    const auto colon = spec.find(':');
    out.name = std::string(spec.substr(0, colon));
    if (out.name.empty()) throw ConfigError("empty profile string");
    if (colon == std::string_view::npos) return out;
    std::string_view rest = spec.substr(colon + 1);
    while (true) {
        const auto comma = rest.find(',');
        const std::string_view tok = rest.substr(0, comma);
        double value = 0.0;
        const auto* first = tok.data();
        const auto* last = tok.data() + tok.size();
        if (!tok.empty() && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (tok.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value))
            throw ConfigError("bad number '" + std::string(tok) + "' in profile string '" +
                              std::string(spec) + "'");
        out.params.push_back(value);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

void expect_params(const ParsedSpec& p, std::size_t n, std::string_view spec) {
    if (p.params.size() != n)
        throw ConfigError("profile '" + std::string(spec) + "' expects " + std::to_string(n) +
                          " parameter(s)");
}

}  // namespace

VelocityProfile VelocityProfile::linear(double alpha) {
    if (!std::isfinite(alpha)) throw InvalidArgument("linear slope must be finite");
    return VelocityProfile(LinearVelocity{alpha});
}

VelocityProfile VelocityProfile::custom(RealFn u0, RealFn du0, bool odd, std::string label) {
    if (!u0 || !du0) throw InvalidArgument("custom velocity needs both u0 and du0");
    return VelocityProfile(CustomVelocity{std::move(u0), std::move(du0), odd, std::move(label)});
}

double VelocityProfile::operator()(double x) const {
    return std::visit(Overloaded{[x](const LinearVelocity& l) { return l.alpha * x; },
                                 [x](const CustomVelocity& c) { return c.u0(x); }},
                      kind_);
}

double VelocityProfile::derivative(double x) const {
    return std::visit(Overloaded{[](const LinearVelocity& l) { return l.alpha; },
                                 [x](const CustomVelocity& c) { return c.du0(x); }},
                      kind_);
}

bool VelocityProfile::is_odd() const {
    return std::visit(Overloaded{[](const LinearVelocity&) { return true; },
                                 [](const CustomVelocity& c) { return c.odd; }},
                      kind_);
}

std::optional<double> VelocityProfile::linear_slope() const {
    if (const auto* l = std::get_if<LinearVelocity>(&kind_)) return l->alpha;
    return std::nullopt;
}

std::string VelocityProfile::describe() const {
    return std::visit(
        Overloaded{[](const LinearVelocity& l) { return "linear:" + format_number(l.alpha); },
                   [](const CustomVelocity& c) { return c.label; }},
        kind_);
}

DensityProfile DensityProfile::uniform() { return DensityProfile(UniformDensity{}); }

DensityProfile DensityProfile::gaussian(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("gaussian density needs r > 0");
    return DensityProfile(GaussianDensity{r});
}

DensityProfile DensityProfile::power_law(double k) {
    if (!std::isfinite(k)) throw InvalidArgument("power-law exponent must be finite");
    return DensityProfile(PowerLawDensity{k});
}

DensityProfile DensityProfile::custom(RealFn f, bool even, bool normalizable, double envelope,
                                      std::string label) {
    if (!f) throw InvalidArgument("custom density needs f");
    return DensityProfile(CustomDensity{std::move(f), even, normalizable, envelope, std::move(label)});
}

double DensityProfile::operator()(double x) const {
    return std::visit(
        Overloaded{[](const UniformDensity&) { return 1.0; },
                   [x](const GaussianDensity& g) {
                       return g.r / std::sqrt(std::numbers::pi) * std::exp(-g.r * g.r * x * x);
                   },
                   [x](const PowerLawDensity& p) { return std::pow(1.0 + x * x, p.k); },
                   [x](const CustomDensity& c) { return c.f(x); }},
        kind_);
}

double DensityProfile::log_eval(double x) const {
    return std::visit(
        Overloaded{[](const UniformDensity&) { return 0.0; },
                   [x](const GaussianDensity& g) {
                       return std::log(g.r / std::sqrt(std::numbers::pi)) - g.r * g.r * x * x;
                   },
                   [x](const PowerLawDensity& p) { return p.k * std::log1p(x * x); },
                   [x](const CustomDensity& c) {
                       const double v = c.f(x);
                       return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
                   }},
        kind_);
}

bool DensityProfile::normalizable() const {
    return std::visit(Overloaded{[](const UniformDensity&) { return false; },
                                 [](const GaussianDensity&) { return true; },
                                 [](const PowerLawDensity& p) { return p.k < -0.5; },
                                 [](const CustomDensity& c) { return c.normalizable; }},
                      kind_);
}

bool DensityProfile::is_even() const {
    if (const auto* c = std::get_if<CustomDensity>(&kind_)) return c->even;
    return true;
}

std::string DensityProfile::describe() const {
    return std::visit(
        Overloaded{[](const UniformDensity&) { return std::string("uniform"); },
                   [](const GaussianDensity& g) { return "gaussian:" + format_number(g.r); },
                   [](const PowerLawDensity& p) { return "powerlaw:" + format_number(p.k); },
                   [](const CustomDensity& c) { return c.label; }},
        kind_);
}

NoiseModel::NoiseModel(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidArgument("noise amplitude sigma must be > 0");
}

double blowup_time(const VelocityProfile& v, const ProbeGrid& grid) {
    if (const auto alpha = v.linear_slope())
        return *alpha < 0.0 ? -1.0 / *alpha : std::numeric_limits<double>::infinity();
    double min_slope = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.points; ++i) min_slope = std::min(min_slope, v.derivative(grid.at(i)));
    return min_slope < 0.0 ? -1.0 / min_slope : std::numeric_limits<double>::infinity();
}

double check_derivative(const VelocityProfile& v, const ProbeGrid& grid) {
    double worst = 0.0;
    for (int i = 0; i < grid.points; ++i) {
        const double x = grid.at(i);
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        const double fd = (v(x + h) - v(x - h)) / (2.0 * h);
        const double exact = v.derivative(x);
        // Where u0' is far below the rounding noise of the difference the
        // relative mismatch means nothing; floor the scale accordingly.
        const double scale = std::max({std::abs(exact), std::abs(fd), 1e-4 * std::max(1.0, std::abs(v(x)))});
        worst = std::max(worst, std::abs(fd - exact) / scale);
    }
    return worst;
}

double separation_from_line(const VelocityProfile& v, double beta, double radius,
                            const ProbeGrid& grid) {
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.points; ++i) {
        const double x = grid.at(i);
        if (std::abs(x) <= radius) continue;
        gap = std::min(gap, std::abs(v(x) - beta * x));
    }
    return gap;
}

VelocityProfile parse_velocity(std::string_view spec) {
    const auto p = split_spec(spec);
    if (p.name == "linear") {
        expect_params(p, 1, spec);
        return VelocityProfile::linear(p.params[0]);
    }
    if (p.name == "tanh") {
        expect_params(p, 1, spec);
        const double a = p.params[0];
        return VelocityProfile::custom(
            [a](double x) { return a * std::tanh(x); },
            [a](double x) {
                const double c = std::cosh(x);
                return a / (c * c);
            },
            true, "tanh:" + format_number(a));
    }
    if (p.name == "cubic") {
        expect_params(p, 1, spec);
        const double c = p.params[0];
        return VelocityProfile::custom([c](double x) { return c * x * x * x; },
                                       [c](double x) { return 3.0 * c * x * x; }, true,
                                       "cubic:" + format_number(c));
    }
    throw ConfigError("unknown velocity profile '" + p.name + "'");
}

DensityProfile parse_density(std::string_view spec) {
    const auto p = split_spec(spec);
    if (p.name == "uniform") {
        expect_params(p, 0, spec);
        return DensityProfile::uniform();
    }
    if (p.name == "gaussian") {
        expect_params(p, 1, spec);
        if (!(p.params[0] > 0.0)) throw ConfigError("gaussian density needs r > 0");
        return DensityProfile::gaussian(p.params[0]);
    }
    if (p.name == "powerlaw") {
        expect_params(p, 1, spec);
        return DensityProfile::power_law(p.params[0]);
    }
    throw ConfigError("unknown density profile '" + p.name + "'");
}

}  // namespace gradstorm
