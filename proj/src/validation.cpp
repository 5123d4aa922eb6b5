#include "gradstorm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gradstorm/asymptotics.hpp"
#include "gradstorm/burgers.hpp"
#include "gradstorm/closedform.hpp"
#include "gradstorm/condmean.hpp"
#include "gradstorm/errors.hpp"
#include "gradstorm/gaslimit.hpp"
#include "gradstorm/kernel.hpp"
#include "gradstorm/parallel.hpp"
#include "gradstorm/sde.hpp"

namespace gradstorm::validation {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

CheckResult make_result(std::string id, std::string title) {
    CheckResult r;
    r.id = std::move(id);
    r.title = std::move(title);
    return r;
}

double rel_err(double value, double ref) {
    return std::abs(value - ref) / std::max(std::abs(ref), 1e-300);
}

// Relative agreement, with an absolute floor for references at 0.
bool close_rel(double value, double ref, double rel, double abs_floor = 1e-12) {
    return std::abs(value - ref) <= rel * std::abs(ref) || std::abs(value - ref) <= abs_floor;
}

CheckResult failed(CheckResult r, const Error& e) {
    r.passed = false;
    r.detail += std::string(r.detail.empty() ? "" : "; ") + "error " + std::string(to_string(e.kind())) +
                ": " + e.what();
    return r;
}

const std::vector<double> kTimesUniform = {0.1, 0.3, 0.5, 0.7, 0.9};
const std::vector<double> kXs = {-2.0, -1.0, 0.0, 1.0, 2.0};

}  // namespace

CheckResult uniform_exactness() {
    auto r = make_result("1", "uniform density, linear data: renormalized quadrature equals alpha x/(1 + alpha t)");
    try {
        const double alpha = -1.0;
        const auto f = DensityProfile::uniform();
        const auto v = VelocityProfile::linear(alpha);
        const std::vector<double> sigmas = {0.5, 1.0, 2.0};
        struct Point {
            double t, x, sigma, value;
        };
        std::vector<Point> pts;
        for (double sigma : sigmas)
            for (double t : kTimesUniform)
                for (double x : kXs) pts.push_back({t, x, sigma, 0.0});
        parallel_for(pts.size(), [&](std::size_t i) {
            pts[i].value = conditional_mean(pts[i].t, pts[i].x, f, v, NoiseModel(pts[i].sigma)).u_hat;
        });
        Table table{"uniform_exactness", {"sigma", "t", "x", "u_hat", "exact"}, {}};
        double worst = 0.0, spread = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            const double exact = closedform::burgers_linear(alpha, p.t, p.x);
            table.rows.push_back({p.sigma, p.t, p.x, p.value, exact});
            ok = ok && close_rel(p.value, exact, 1e-8);
            if (exact != 0.0) worst = std::max(worst, rel_err(p.value, exact));
            const double first = pts[i % (kTimesUniform.size() * kXs.size())].value;
            const double d = std::abs(p.value - first);
            ok = ok && (d <= 1e-8 * std::abs(first) || d <= 1e-12);
            if (first != 0.0) spread = std::max(spread, d / std::abs(first));
        }
        r.passed = ok;
        r.metrics = {{"max_rel_error", worst}, {"max_rel_sigma_spread", spread}};
        r.detail = "75 points (5x5 grid, t <= 0.9T, sigma in {0.5,1,2}); max rel error " + fmt(worst) +
                   ", max sigma spread " + fmt(spread);
        r.tables.push_back(std::move(table));
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult gaussian_closed_form() {
    auto r = make_result("2", "Gaussian density, linear data: quadrature equals the closed form, slope -3alpha/2 at T");
    try {
        const double alpha = -1.0, rr = 1.0, sigma = 1.0;
        const auto f = DensityProfile::gaussian(rr);
        const auto v = VelocityProfile::linear(alpha);
        const NoiseModel noise(sigma);
        const std::vector<double> times = {0.25, 0.5, 0.75, 1.0, 1.5};
        Table table{"gaussian_closed_form", {"t", "x", "u_hat", "closed_form"}, {}};
        double worst = 0.0;
        bool ok = true;
        for (double t : times) {
            for (double x : kXs) {
                const double q = conditional_mean(t, x, f, v, noise).u_hat;
                const double exact = closedform::gaussian_mean(alpha, rr, sigma, t, x);
                const double err = std::abs(q - exact);
                worst = std::max(worst, err);
                ok = ok && err <= 1e-8 * std::max(1.0, std::abs(exact));
                table.rows.push_back({t, x, q, exact});
            }
        }
        const double T = -1.0 / alpha;
        const double slope = conditional_mean(T, 0.0, f, v, noise).du_hat_dx;
        const double slope_err = std::abs(slope - (-1.5 * alpha));
        ok = ok && slope_err <= 1e-6;
        r.passed = ok;
        r.metrics = {{"max_abs_error", worst}, {"slope_at_T", slope}, {"slope_error", slope_err}};
        r.detail = "25 points incl. t = T; max error " + fmt(worst) + "; du/dx(T,0) = " + fmt(slope) +
                   " (target " + fmt(-1.5 * alpha) + ")";
        r.tables.push_back(std::move(table));
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult monte_carlo_agreement(const SuiteOptions& opts) {
    auto r = make_result("3", "exact Monte Carlo agrees with quadrature within 3 standard errors");
    try {
        struct Config {
            std::string name;
            DensityProfile f;
            double t;
        };
        const double alpha = -1.0;
        const auto v = VelocityProfile::linear(alpha);
        const NoiseModel noise(1.0);
        const std::vector<Config> configs = {{"mc_uniform", DensityProfile::uniform(), 0.5},
                                             {"mc_gaussian", DensityProfile::gaussian(1.0), 1.0}};
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) grid.push_back(-2.0 + 0.1 * i);
        bool ok = true;
        for (std::size_t c = 0; c < configs.size(); ++c) {
            const auto& cfg = configs[c];
            McConfig mc;
            mc.n_samples = opts.mc_samples;
            mc.seed = opts.seed + c;
            const auto est = mc_conditional_mean(cfg.t, grid, cfg.f, v, noise, mc);
            Table table{cfg.name, {"x_center", "x_mean", "u_hat_mc", "std_error", "count", "u_hat_quad", "within_3se"},
                        {}};
            int reported = 0, within = 0;
            for (const auto& e : est) {
                double quad = std::nan(""), inside = 0.0;
                if (e.reported) {
                    ++reported;
                    quad = conditional_mean(cfg.t, e.x_mean, cfg.f, v, noise).u_hat;
                    if (std::abs(e.u_hat_mc - quad) < 3.0 * e.std_error) {
                        ++within;
                        inside = 1.0;
                    }
                }
                table.rows.push_back({e.x_center, e.x_mean, e.u_hat_mc, e.std_error,
                                      static_cast<double>(e.count_in_bin), quad, inside});
            }
            const double frac = reported > 0 ? static_cast<double>(within) / reported : 0.0;
            ok = ok && reported == static_cast<int>(grid.size()) && frac >= 0.95;
            r.metrics.emplace_back(cfg.name + "_fraction_within_3se", frac);
            r.metrics.emplace_back(cfg.name + "_reported_bins", reported);
            r.detail += (r.detail.empty() ? "" : "; ") + cfg.name + ": " + std::to_string(within) + "/" +
                        std::to_string(reported) + " bins within 3 SE";
            r.tables.push_back(std::move(table));
        }
        r.detail += " (" + std::to_string(opts.mc_samples) + " samples each)";
        r.passed = ok && opts.mc_samples >= 10'000;
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

namespace {

Table scan_table(const BlowupScanResult& s) {
    Table t{"blowup_k" + fmt(s.k), {"epsilon", "slope_at_origin", "renormalized", "L_used"}, {}};
    for (std::size_t i = 0; i < s.epsilon_grid.size(); ++i)
        t.rows.push_back({s.epsilon_grid[i], s.slope_at_origin[i], s.renormalized[i] ? 1.0 : 0.0, s.L_used[i]});
    return t;
}

BlowupScanResult scan(double k) {
    return blowup_scan(k, -1.0, NoiseModel(1.0), default_epsilon_grid());
}

}  // namespace

CheckResult blowup_threshold() {
    auto r = make_result("4", "blowup threshold: bounded for k <= -1, rate |eps|^-(2k+2), 1/eps, log-corrected");
    try {
        bool ok = true;
        const auto f_base = [](double k) { return DensityProfile::power_law(k); };
        const auto v = VelocityProfile::linear(-1.0);
        for (double k : {-2.0, -1.5}) {
            const auto s = scan(k);
            // Baseline away from the critical time: t0 = -1/beta with beta = 2 alpha.
            const double baseline = std::abs(conditional_mean(0.5, 0.0, f_base(k), v, NoiseModel(1.0)).du_hat_dx);
            double peak = 0.0;
            for (double y : s.slope_at_origin) peak = std::isfinite(y) ? std::max(peak, std::abs(y)) : 1e300;
            const bool pass = s.failures.empty() && peak < 10.0 * baseline;
            ok = ok && pass;
            r.metrics.emplace_back("k" + fmt(k) + "_max_slope", peak);
            r.metrics.emplace_back("k" + fmt(k) + "_baseline", baseline);
            r.detail += "k=" + fmt(k) + ": max |slope| " + fmt(peak) + " vs baseline " + fmt(baseline) +
                        (pass ? " ok" : " FAIL") + "; ";
            r.tables.push_back(scan_table(s));
        }
        {
            const auto s = scan(-0.75);
            const bool pass = s.failures.empty() && std::abs(s.fitted_exponent - 0.5) <= 0.1;
            ok = ok && pass;
            r.metrics.emplace_back("k-0.75_exponent", s.fitted_exponent);
            r.detail += "k=-0.75: exponent " + fmt(s.fitted_exponent) + (pass ? " ok" : " FAIL") + "; ";
            r.tables.push_back(scan_table(s));
        }
        for (double k : {0.0, 1.0}) {
            const auto s = scan(k);
            const bool pass = s.failures.empty() && std::abs(s.fitted_exponent - 1.0) <= 0.05;
            ok = ok && pass;
            r.metrics.emplace_back("k" + fmt(k) + "_exponent", s.fitted_exponent);
            r.detail += "k=" + fmt(k) + ": exponent " + fmt(s.fitted_exponent) + (pass ? " ok" : " FAIL") + "; ";
            r.tables.push_back(scan_table(s));
        }
        {
            const auto s = scan(-0.5);
            const bool pass = s.failures.empty() && s.log_model_residual < 0.1;
            ok = ok && pass;
            r.metrics.emplace_back("k-0.5_log_model_c", s.log_model_prefactor);
            r.metrics.emplace_back("k-0.5_log_model_residual", s.log_model_residual);
            r.detail += "k=-0.5: log model c " + fmt(s.log_model_prefactor) + ", residual " +
                        fmt(s.log_model_residual) + (pass ? " ok" : " FAIL");
            r.tables.push_back(scan_table(s));
        }
        r.passed = ok;
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult b3_prefactor_report() {
    auto r = make_result("5", "prefactor of 1/eps for k > -1/2: 2k+1 against 2(2k+1)");
    r.report_only = true;
    try {
        Table table{"b3_prefactor", {"k", "fitted_B", "candidate_2k_plus_1", "candidate_2_2k_plus_1",
                                     "rel_dev_2k_plus_1", "rel_dev_2_2k_plus_1", "A1_over_A3"},
                    {}};
        for (double k : {0.0, 0.5, 1.0}) {
            const auto s = scan(k);
            const double fitted = s.inverse_eps_prefactor;
            const double c1 = 2.0 * k + 1.0;
            const double c2 = 2.0 * (2.0 * k + 1.0);
            const double d1 = rel_err(fitted, c1);
            const double d2 = rel_err(fitted, c2);
            const double ratio = coefficients(k, -1.0, 1.0).a1_over_a3;
            table.rows.push_back({k, fitted, c1, c2, d1, d2, ratio});
            std::string verdict;
            if (d1 <= 0.15 && d2 <= 0.15) verdict = "both candidates within 15%";
            else if (d1 <= 0.15) verdict = "2k+1 within 15%";
            else if (d2 <= 0.15) verdict = "2(2k+1) within 15%";
            else verdict = "neither candidate within 15%";
            r.detail += "k=" + fmt(k) + ": fitted " + fmt(fitted) + ", 2k+1=" + fmt(c1) + " (dev " + fmt(d1) +
                        "), 2(2k+1)=" + fmt(c2) + " (dev " + fmt(d2) + "): " + verdict + "; ";
            r.metrics.emplace_back("k" + fmt(k) + "_fitted_B", fitted);
        }
        r.tables.push_back(std::move(table));
        r.passed = true;
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult suppressed_limit() {
    auto r = make_result("6", "k = -1: terminal slope approaches B4 = 3/2 - sqrt(6/pi)");
    try {
        const auto s = blowup_scan(-1.0, -1.0, NoiseModel(1.0), {-1e-6});
        const double slope = s.slope_at_origin.at(0);
        const double b4 = b4_limit_slope(-1.0, 1.0);
        const double dev = rel_err(slope, b4);
        r.passed = s.failures.empty() && dev <= 0.10;
        r.metrics = {{"slope_eps_1e-6", slope}, {"B4", b4}, {"rel_deviation", dev}};
        r.detail = "slope " + fmt(slope) + " vs B4 " + fmt(b4) + ", deviation " + fmt(dev);
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult slope_expansion_consistency() {
    auto r = make_result("7", "slope expansion at t0 = -1/beta matches the quadrature derivative");
    try {
        const auto f = DensityProfile::gaussian(1.0);
        const auto v = VelocityProfile::linear(-1.0);
        const NoiseModel noise(1.0);
        bool ok = true;
        for (double beta : {-2.0, -0.5}) {
            const auto expansion = theorem1_slope(beta, v, f, 1.0);
            const double quad = conditional_mean(-1.0 / beta, 0.0, f, v, noise).du_hat_dx;
            const double dev = rel_err(expansion.value, quad);
            ok = ok && dev <= 1e-4;
            r.metrics.emplace_back("beta" + fmt(beta) + "_expansion", expansion.value);
            r.metrics.emplace_back("beta" + fmt(beta) + "_quadrature", quad);
            r.detail += "beta=" + fmt(beta) + ": " + fmt(expansion.value) + " vs " + fmt(quad) + " (rel " +
                        fmt(dev) + "); ";
        }
        r.passed = ok;
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult vanishing_noise_limit() {
    auto r = make_result("8", "sigma -> 0: monotone approach to the Burgers solution, continuity and Fokker-Planck residuals");
    try {
        const double alpha = -1.0, rr = 1.0, t = 0.5, x = 1.0;
        const auto f = DensityProfile::gaussian(rr);
        const auto v = VelocityProfile::linear(alpha);
        const auto conv = sigma_convergence(f, v, t, x, default_sigma_sequence(10));
        Table sigma_table{"sigma_convergence", {"sigma", "u_hat", "limit", "error", "exact_gap"}, {}};
        double gap_worst = 0.0;
        for (const auto& p : conv.points) {
            const double gap = std::abs(closedform::gaussian_mean(alpha, rr, p.sigma, t, x) -
                                        closedform::burgers_linear(alpha, t, x));
            gap_worst = std::max(gap_worst, std::abs(p.error - gap));
            sigma_table.rows.push_back({p.sigma, p.u_hat, p.limit, p.error, gap});
        }

        const NoiseModel noise(1.0);
        Table resid{"residuals", {"t", "x", "u", "continuity", "fokker_planck"}, {}};
        struct Point {
            double t, x, u = 0.0, cont = 0.0, fp = 0.0;
        };
        std::vector<Point> pts;
        for (double tt : {0.3, 0.4, 0.5, 0.6, 0.7})
            for (double xx : {-1.0, -0.5, 0.0, 0.5, 1.0}) pts.push_back({tt, xx});
        parallel_for(pts.size(), [&](std::size_t i) {
            auto& p = pts[i];
            p.u = conditional_mean(p.t, p.x, f, v, noise).u_hat + 0.25;
            p.cont = continuity_residual(p.t, p.x, f, v, noise).normalized;
            p.fp = fokker_planck_residual(p.t, {p.x, p.u}, f, v, noise).normalized;
        });
        double cont_worst = 0.0, fp_worst = 0.0;
        for (const auto& p : pts) {
            cont_worst = std::max(cont_worst, p.cont);
            fp_worst = std::max(fp_worst, p.fp);
            resid.rows.push_back({p.t, p.x, p.u, p.cont, p.fp});
        }
        r.passed = conv.monotone && gap_worst <= 1e-8 && cont_worst < 1e-3 && fp_worst < 1e-3;
        r.metrics = {{"monotone", conv.monotone ? 1.0 : 0.0},
                     {"fitted_order", conv.fitted_order},
                     {"max_gap_mismatch", gap_worst},
                     {"max_continuity_residual", cont_worst},
                     {"max_fokker_planck_residual", fp_worst}};
        r.detail = std::string("monotone ") + (conv.monotone ? "yes" : "no") + ", order " +
                   fmt(conv.fitted_order) + ", gap mismatch " + fmt(gap_worst) + ", continuity " +
                   fmt(cont_worst) + ", Fokker-Planck " + fmt(fp_worst) + " over 25 points";
        r.tables.push_back(std::move(sigma_table));
        r.tables.push_back(std::move(resid));
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult kernel_transcription() {
    auto r = make_result("kernel", "written-out kernel exponent equals the covariance form; u-marginal equals the s-weight");
    try {
        double worst_exp = 0.0, worst_marg = 0.0;
        for (double t : {0.2, 1.0, 2.5}) {
            for (double sigma : {0.5, 1.0, 2.0}) {
                const GaussianKernelParams params(t, sigma);
                const double log_norm = -std::log(2.0 * std::numbers::pi * std::sqrt(params.det()));
                for (double s : {-1.0, 0.3}) {
                    const double u0s = -0.7 * s + 0.2;
                    for (PhasePoint end : {PhasePoint{0.5, -0.4}, PhasePoint{-1.2, 1.1}}) {
                        const double cov_form = log_transition_density(params, {s, u0s}, end) - log_norm;
                        const double written = expanded_exponent(t, sigma, s, u0s, end);
                        worst_exp = std::max(worst_exp, std::abs(cov_form - written) / std::max(1.0, std::abs(written)));
                    }
                    const double marg = kernel_velocity_marginal(params, {s, u0s}, 0.4);
                    const double weight = std::sqrt(3.0 / (2.0 * std::numbers::pi * sigma * sigma * t * t * t)) *
                                          position_weight(t, sigma, s, u0s, 0.4);
                    worst_marg = std::max(worst_marg, std::abs(marg - weight) / std::max(weight, 1e-300));
                }
            }
        }
        r.passed = worst_exp <= 1e-12 && worst_marg <= 1e-9;
        r.metrics = {{"max_exponent_mismatch", worst_exp}, {"max_marginal_mismatch", worst_marg}};
        r.detail = "exponent mismatch " + fmt(worst_exp) + ", marginal mismatch " + fmt(worst_marg);
    } catch (const Error& e) {
        return failed(r, e);
    }
    return r;
}

CheckResult characteristics_agreement(const SuiteOptions& opts) {
    auto r = make_result("characteristics", "vanishing-noise mean equals the characteristic solution before the shock");
    try {
        const auto lin = VelocityProfile::linear(-1.0);
        const auto tanh_v = parse_velocity("tanh:-1");
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            SampleStream rng(opts.seed, i, 7);
            const double t = 0.95 * rng.uniform();
            const double x = -3.0 + 6.0 * rng.uniform();
            if (t <= 0.0) continue;
            for (const auto* v : {&lin, &tanh_v}) {
                const double vn = vanishing_noise_mean(*v, t, x).value;
                const auto outcome = solve_characteristics(*v, t, x);
                const double ref = std::get<UniqueRoot>(outcome).u;
                worst = std::max(worst, std::abs(vn - ref) / std::max(1.0, std::abs(ref)));
            }
            worst = std::max(worst, std::abs(vanishing_noise_mean(lin, t, x).value -
                                             closedform::burgers_linear(-1.0, t, x)));
        }
        r.passed = worst <= 1e-10;
        r.metrics = {{"max_mismatch", worst}};
        r.detail = "100 random pre-shock points, linear and tanh data; max mismatch " + fmt(worst);
    } catch (const Error& e) {
        return failed(r, e);
    } catch (const std::bad_variant_access&) {
        r.passed = false;
        r.detail = "characteristics were not unique before the shock";
    }
    return r;
}

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
    std::vector<CheckResult> out;
    out.push_back(uniform_exactness());
    out.push_back(gaussian_closed_form());
    out.push_back(monte_carlo_agreement(opts));
    out.push_back(blowup_threshold());
    out.push_back(b3_prefactor_report());
    out.push_back(suppressed_limit());
    out.push_back(slope_expansion_consistency());
    out.push_back(vanishing_noise_limit());
    out.push_back(kernel_transcription());
    out.push_back(characteristics_agreement(opts));
    return out;
}

}  // namespace gradstorm::validation
