#include "gradstorm/sde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "gradstorm/errors.hpp"
#include "gradstorm/parallel.hpp"
#include "gradstorm/roots.hpp"

namespace gradstorm {

namespace {

constexpr int kCells = 4096;
constexpr std::uint64_t kChunk = 65536;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 5-point Gauss-Legendre on [a, b].
template <class F>
double gauss5(F&& f, double a, double b) {
    static constexpr std::array<double, 5> nodes = {0.0, 0.5384693101056831, -0.5384693101056831,
                                                    0.9061798459386640, -0.9061798459386640};
    static constexpr std::array<double, 5> weights = {0.5688888888888889, 0.4786286704993665,
                                                      0.4786286704993665, 0.2369268850561891,
                                                      0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
}

double need_L(std::optional<double> L, const char* what) {
    if (!L) throw InvalidArgument(std::string(what) + " needs a truncation L");
    if (!(*L > 0.0) || !std::isfinite(*L)) throw InvalidArgument("truncation L must be finite and > 0");
    return *L;
}

// Welford accumulators, merged with Chan's formula.
struct BinStats {
    std::uint64_t n = 0;
    double mean_x = 0.0;
    double mean_u = 0.0;
    double m2_u = 0.0;

    void add(double x, double u) {
        ++n;
        const double dn = static_cast<double>(n);
        mean_x += (x - mean_x) / dn;
        const double du = u - mean_u;
        mean_u += du / dn;
        m2_u += du * (u - mean_u);
    }

    void merge(const BinStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double total = na + nb;
        const double du = o.mean_u - mean_u;
        mean_x += (o.mean_x - mean_x) * nb / total;
        mean_u += du * nb / total;
        m2_u += o.m2_u + du * du * na * nb / total;
        n += o.n;
    }
};

}  // namespace

PhasePoint sample_terminal(double t, double x0, double u0val, double sigma, SampleStream& rng) {
    if (t == 0.0) return {x0, u0val};
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double g2 = sigma * std::sqrt(t) * z1;
    const double g1 = sigma * t * std::sqrt(t) * (0.5 * z1 + z2 / (2.0 * std::sqrt(3.0)));
    return {x0 + u0val * t + g1, u0val + g2};
}

InitialSampler::InitialSampler(const DensityProfile& f, std::optional<double> L) : f_(f), L_(L) {
    if (L_) need_L(L_, "sampler");
    if (std::holds_alternative<UniformDensity>(f_.kind())) {
        need_L(L_, "uniform density");
    } else if (std::holds_alternative<CustomDensity>(f_.kind())) {
        need_L(L_, "custom density");
    } else if (const auto* p = std::get_if<PowerLawDensity>(&f_.kind())) {
        k_ = p->k;
        if (k_ > -1.0) need_L(L_, "power law with k > -1");
        theta_max_ = L_ ? std::atan(*L_) : 0.5 * std::numbers::pi;
        cell_ = 2.0 * theta_max_ / kCells;
        cumulative_.assign(kCells + 1, 0.0);
        for (int i = 0; i < kCells; ++i) {
            const double a = -theta_max_ + i * cell_;
            cumulative_[i + 1] = cumulative_[i] + gauss5([&](double th) { return theta_density(th); }, a, a + cell_);
        }
        mass_ = cumulative_.back();
        for (double& c : cumulative_) c /= mass_;
    }
}

double InitialSampler::theta_density(double theta) const {
    // (1 + tan^2)^k sec^2 = cos^(-2k-2)
    return std::pow(std::cos(theta), -2.0 * k_ - 2.0);
}

double InitialSampler::theta_cdf(double theta) const {
    if (theta <= -theta_max_) return 0.0;
    if (theta >= theta_max_) return 1.0;
    const int i = std::min(kCells - 1, static_cast<int>((theta + theta_max_) / cell_));
    const double a = -theta_max_ + i * cell_;
    return cumulative_[i] + gauss5([&](double th) { return theta_density(th); }, a, theta) / mass_;
}

double InitialSampler::cdf(double x) const {
    return std::visit(
        [&](const auto& kind) -> double {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, UniformDensity>) {
                return std::clamp((x + *L_) / (2.0 * *L_), 0.0, 1.0);
            } else if constexpr (std::is_same_v<K, GaussianDensity>) {
                const double full = 0.5 * std::erfc(-kind.r * x);
                if (!L_) return full;
                const double lo = 0.5 * std::erfc(kind.r * *L_);
                const double hi = 0.5 * std::erfc(-kind.r * *L_);
                return std::clamp((full - lo) / (hi - lo), 0.0, 1.0);
            } else if constexpr (std::is_same_v<K, PowerLawDensity>) {
                return theta_cdf(std::atan(x));
            } else {
                throw InvalidArgument("cdf is not available for custom densities");
            }
        },
        f_.kind());
}

double InitialSampler::draw(SampleStream& rng) const {
    return std::visit(
        [&](const auto& kind) -> double {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, UniformDensity>) {
                return -*L_ + 2.0 * *L_ * rng.uniform();
            } else if constexpr (std::is_same_v<K, GaussianDensity>) {
                const double sd = 1.0 / (kind.r * std::sqrt(2.0));
                for (;;) {
                    const double x = sd * rng.normal();
                    if (!L_ || std::abs(x) <= *L_) return x;
                }
            } else if constexpr (std::is_same_v<K, PowerLawDensity>) {
                const double c = rng.uniform();
                const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), c);
                const int i = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, kCells - 1);
                const double a = -theta_max_ + i * cell_;
                const double b = a + cell_;
                auto F = [&](double th) {
                    return cumulative_[i] + gauss5([&](double s) { return theta_density(s); }, a, th) / mass_ - c;
                };
                auto dF = [&](double th) { return theta_density(th) / mass_; };
                double theta;
                if (F(a) >= 0.0) {
                    theta = a;
                } else if (F(b) <= 0.0) {
                    theta = b;
                } else {
                    theta = polish_root(F, dF, a, b, 1e-13);
                }
                return std::tan(theta);
            } else {
                const double L = *L_;
                for (;;) {
                    const double x = -L + 2.0 * L * rng.uniform();
                    const double fx = kind.f(x);
                    if (fx > kind.envelope)
                        throw EnvelopeViolation("density " + kind.label + " exceeds its envelope at x=" +
                                                std::to_string(x));
                    if (rng.uniform() * kind.envelope < fx) return x;
                }
            }
        },
        f_.kind());
}

double draw_initial(const DensityProfile& f, std::optional<double> L, SampleStream& rng) {
    return InitialSampler(f, L).draw(rng);
}

double default_truncation(const VelocityProfile& v, double t, std::span<const double> x_grid) {
    double slope = 0.0;
    if (const auto alpha = v.linear_slope()) {
        slope = std::abs(*alpha);
    } else {
        const ProbeGrid grid;
        for (int i = 0; i < grid.points; ++i) slope = std::max(slope, std::abs(v.derivative(grid.at(i))));
    }
    double reach = 0.0;
    for (double x : x_grid) reach = std::max(reach, std::abs(x));
    return 50.0 * std::max(1.0, reach * (1.0 + slope * t));
}

double mc_bandwidth(double t, double sigma, std::span<const double> x_grid, const McConfig& cfg) {
    if (cfg.bandwidth) {
        if (!(*cfg.bandwidth > 0.0)) throw InvalidArgument("bandwidth must be > 0");
        return *cfg.bandwidth;
    }
    double range = 0.0;
    if (!x_grid.empty()) {
        const auto [lo, hi] = std::minmax_element(x_grid.begin(), x_grid.end());
        range = *hi - *lo;
    }
    return std::max(0.5 * sigma * t * std::sqrt(t), range / 200.0);
}

std::vector<McEstimate> mc_conditional_mean(double t, std::span<const double> x_grid, const DensityProfile& f,
                                            const VelocityProfile& v, const NoiseModel& noise,
                                            const McConfig& cfg) {
    if (!(t >= 0.0)) throw InvalidArgument("Monte Carlo needs t >= 0");
    if (cfg.n_samples == 0) throw InvalidArgument("n_samples must be positive");
    std::vector<double> centers(x_grid.begin(), x_grid.end());
    if (!std::is_sorted(centers.begin(), centers.end()))
        throw InvalidArgument("Monte Carlo x grid must be sorted");

    std::optional<double> L = cfg.L;
    const bool needs_truncation = std::holds_alternative<UniformDensity>(f.kind()) ||
                                  std::holds_alternative<CustomDensity>(f.kind()) ||
                                  (std::holds_alternative<PowerLawDensity>(f.kind()) &&
                                   std::get<PowerLawDensity>(f.kind()).k > -1.0);
    if (!L && needs_truncation) L = default_truncation(v, t, x_grid);
    const InitialSampler sampler(f, L);
    const double half = 0.5 * mc_bandwidth(t, noise.sigma(), x_grid, cfg);
    const double sigma = noise.sigma();

    const std::uint64_t chunks = (cfg.n_samples + kChunk - 1) / kChunk;
    const auto partial = parallel_map<std::vector<BinStats>>(chunks, [&](std::size_t c) {
        std::vector<BinStats> stats(centers.size());
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(cfg.n_samples, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) {
            SampleStream rng(cfg.seed, i);
            const double x0 = sampler.draw(rng);
            const auto p = sample_terminal(t, x0, v(x0), sigma, rng);
            // Bins whose centre lies within half a width of X.
            auto first = std::lower_bound(centers.begin(), centers.end(), p.x - half);
            for (auto it = first; it != centers.end() && *it <= p.x + half; ++it)
                stats[static_cast<std::size_t>(it - centers.begin())].add(p.x, p.u);
        }
        return stats;
    });

    std::vector<BinStats> total(centers.size());
    for (const auto& chunk : partial)
        for (std::size_t b = 0; b < centers.size(); ++b) total[b].merge(chunk[b]);

    std::vector<McEstimate> out;
    for (std::size_t b = 0; b < centers.size(); ++b) {
        McEstimate e;
        e.x_center = centers[b];
        e.count_in_bin = total[b].n;
        e.reported = total[b].n > 30;
        if (e.reported) {
            const double n = static_cast<double>(total[b].n);
            e.x_mean = total[b].mean_x;
            e.u_hat_mc = total[b].mean_u;
            e.std_error = std::sqrt(total[b].m2_u / (n - 1.0)) / std::sqrt(n);
        } else {
            e.x_mean = kNaN;
            e.u_hat_mc = kNaN;
            e.std_error = kNaN;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace gradstorm
