#include "gradstorm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradstorm/asymptotics.hpp"
#include "gradstorm/burgers.hpp"
#include "gradstorm/condmean.hpp"
#include "gradstorm/errors.hpp"
#include "gradstorm/gaslimit.hpp"
#include "gradstorm/parallel.hpp"
#include "gradstorm/sde.hpp"
#include "gradstorm/validation.hpp"

namespace gradstorm::cli {

namespace {

using Json = nlohmann::ordered_json;
using Values = std::map<std::string, std::string>;

constexpr const char* kVersion = GRADSTORM_VERSION;

// Keys naming where output goes; kept out of the embedded config so that
// artifacts written to different places stay byte-identical.
const std::set<std::string> kOutputKeys = {"out", "csv", "residuals", "out-dir"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, std::string_view text) {
    std::string_view s = text;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("--" + key + ": not a number: '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_count(const std::string& key, std::string_view text) {
    // Accept 1e6 style counts as long as they are whole.
    const double v = parse_real(key, text);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
        throw ConfigError("--" + key + ": not a nonnegative integer: '" + std::string(text) + "'");
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// "a:b:n" -> n points from a to b inclusive.
std::vector<double> parse_grid(const std::string& key, const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("--" + key + ": expected a:b:n, got '" + text + "'");
    const double a = parse_real(key, parts[0]);
    const double b = parse_real(key, parts[1]);
    const auto n = parse_count(key, parts[2]);
    if (n == 0) throw ConfigError("--" + key + ": n must be >= 1");
    std::vector<double> out;
    for (std::uint64_t i = 0; i < n; ++i)
        out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::pair<double, double> parse_range(const std::string& key, const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw ConfigError("--" + key + ": expected a:b, got '" + text + "'");
    return {parse_real(key, parts[0]), parse_real(key, parts[1])};
}

VelocityProfile velocity_of(const Values& v) { return parse_velocity(v.at("velocity")); }
DensityProfile density_of(const Values& v) { return parse_density(v.at("density")); }

NoiseModel noise_of(const Values& v) {
    const double sigma = parse_real("sigma", v.at("sigma"));
    if (!(sigma > 0.0)) throw ConfigError("--sigma must be > 0");
    return NoiseModel(sigma);
}

Json config_json(const std::string& command, const Values& values) {
    Json cfg;
    cfg["command"] = command;
    for (const auto& [k, val] : values)
        if (!kOutputKeys.count(k)) cfg[k] = val;
    return cfg;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

void write_csv(std::ostream& os, const std::string& command, const Values& values, const Csv& csv) {
    os << "# gradstorm " << kVersion << "\n";
    os << "# command = " << command << "\n";
    for (const auto& [k, v] : values)
        if (!kOutputKeys.count(k)) os << "# " << k << " = " << v << "\n";
    for (const auto& c : csv.comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < csv.columns.size(); ++i) os << (i ? "," : "") << csv_field(csv.columns[i]);
    os << "\n";
    for (const auto& row : csv.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << "\n";
    }
}

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << "\n"; }

// Runs `emit` against the --out file when given, else against stdout.
template <class Emit>
void to_destination(const Values& values, const std::string& key, std::ostream& fallback, Emit&& emit) {
    const auto it = values.find(key);
    if (it == values.end() || it->second.empty()) {
        emit(fallback);
        return;
    }
    std::ofstream file(it->second, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + it->second + "' for writing");
    emit(file);
}

Json sample_json(const MeanFieldSample& s) {
    Json j;
    j["t"] = s.t;
    j["x"] = s.x;
    j["u_hat"] = s.u_hat;
    j["du_hat_dx"] = s.du_hat_dx;
    j["quadrature_error"] = s.quadrature_error;
    j["renormalized"] = s.renormalized;
    j["L_used"] = s.L_used ? Json(*s.L_used) : Json(nullptr);
    return j;
}

std::vector<std::string> sample_row(const MeanFieldSample& s) {
    return {format_real(s.t),
            format_real(s.x),
            format_real(s.u_hat),
            format_real(s.du_hat_dx),
            format_real(s.quadrature_error),
            s.renormalized ? "true" : "false",
            s.L_used ? format_real(*s.L_used) : ""};
}

const std::vector<std::string> kSampleColumns = {"t",  "x", "u_hat", "du_hat_dx", "quadrature_error",
                                                 "renormalized", "L_used"};

// ---------------------------------------------------------------- commands

int cmd_eval(const Values& v, std::ostream& out) {
    const double t = parse_real("t", v.at("t"));
    const double x = parse_real("x", v.at("x"));
    const auto sample = conditional_mean(t, x, density_of(v), velocity_of(v), noise_of(v));
    Json j = sample_json(sample);
    j["version"] = kVersion;
    j["config"] = config_json("eval", v);
    to_destination(v, "out", out, [&](std::ostream& os) { write_json(os, j); });
    return 0;
}

int cmd_sweep(const Values& v, std::ostream& out) {
    const auto ts = parse_grid("t-grid", v.at("t-grid"));
    const auto xs = parse_grid("x-grid", v.at("x-grid"));
    const auto f = density_of(v);
    const auto vel = velocity_of(v);
    const auto noise = noise_of(v);
    const auto samples = parallel_map<MeanFieldSample>(ts.size() * xs.size(), [&](std::size_t i) {
        return conditional_mean(ts[i / xs.size()], xs[i % xs.size()], f, vel, noise);
    });
    Csv csv;
    csv.columns = kSampleColumns;
    for (const auto& s : samples) csv.add(sample_row(s));
    to_destination(v, "out", out, [&](std::ostream& os) { write_csv(os, "sweep", v, csv); });
    return 0;
}

int cmd_mc(const Values& v, std::ostream& out) {
    const double t = parse_real("t", v.at("t"));
    const auto [lo, hi] = parse_range("x-range", v.at("x-range"));
    const auto bins = parse_count("bins", v.at("bins"));
    if (bins == 0) throw ConfigError("--bins must be >= 1");
    const auto grid = parse_grid("x-range", trim(v.at("x-range")) + ":" + std::to_string(bins));
    (void)lo;
    (void)hi;
    McConfig cfg;
    cfg.n_samples = parse_count("samples", v.at("samples"));
    cfg.seed = parse_count("seed", v.at("seed"));
    if (!v.at("bandwidth").empty()) cfg.bandwidth = parse_real("bandwidth", v.at("bandwidth"));
    if (!v.at("L").empty()) cfg.L = parse_real("L", v.at("L"));
    const auto f = density_of(v);
    const auto vel = velocity_of(v);
    const auto noise = noise_of(v);
    const auto est = mc_conditional_mean(t, grid, f, vel, noise, cfg);
    const auto quad = parallel_map<double>(est.size(), [&](std::size_t i) {
        if (!est[i].reported) return std::nan("");
        return conditional_mean(t, est[i].x_mean, f, vel, noise).u_hat;
    });
    Csv csv;
    csv.comments.push_back("bandwidth_used = " + format_real(mc_bandwidth(t, noise.sigma(), grid, cfg)));
    csv.columns = {"x_center", "x_mean", "u_hat_mc", "std_error", "count", "u_hat_quad", "status"};
    for (std::size_t i = 0; i < est.size(); ++i) {
        const auto& e = est[i];
        csv.add({format_real(e.x_center), format_real(e.x_mean), format_real(e.u_hat_mc), format_real(e.std_error),
                 std::to_string(e.count_in_bin), format_real(quad[i]), e.reported ? "ok" : "EmptyBin"});
    }
    to_destination(v, "out", out, [&](std::ostream& os) { write_csv(os, "mc", v, csv); });
    return 0;
}

int cmd_blowup(const Values& v, std::ostream& out) {
    const double k = parse_real("k", v.at("k"));
    const double alpha = parse_real("alpha", v.at("alpha"));
    const auto [m1, m2] = parse_range("eps-decades", v.at("eps-decades"));
    if (m1 != std::floor(m1) || m2 != std::floor(m2) || m1 < 0 || m2 < m1)
        throw ConfigError("--eps-decades: expected integers 0 <= m1 <= m2");
    const auto grid = default_epsilon_grid(static_cast<int>(4 * m1), static_cast<int>(4 * m2));
    const auto s = blowup_scan(k, alpha, noise_of(v), grid);
    const auto report = classify_regime(k, alpha, s.sigma);

    Json j;
    j["version"] = kVersion;
    j["config"] = config_json("blowup", v);
    j["k"] = s.k;
    j["alpha"] = s.alpha;
    j["sigma"] = s.sigma;
    j["epsilon_grid"] = s.epsilon_grid;
    j["slope_at_origin"] = s.slope_at_origin;
    j["renormalized"] = s.renormalized;
    j["L_used"] = s.L_used;
    Json failures = Json::array();
    for (const auto& fl : s.failures) failures.push_back({{"index", fl.index}, {"message", fl.message}});
    j["failures"] = failures;
    j["fitted_exponent"] = s.fitted_exponent;
    j["fitted_prefactor"] = s.fitted_prefactor;
    j["fit_points"] = s.fit_points;
    j["inverse_eps_prefactor"] = s.inverse_eps_prefactor;
    j["log_model_prefactor"] = s.log_model_prefactor;
    j["log_model_residual"] = s.log_model_residual;
    j["predicted_regime"] = std::string(to_string(report.regime));
    j["predicted_exponent"] = report.exponent;
    to_destination(v, "out", out, [&](std::ostream& os) { write_json(os, j); });

    if (!v.at("csv").empty()) {
        Csv csv;
        csv.columns = {"epsilon", "slope_at_origin", "renormalized", "L_used"};
        for (std::size_t i = 0; i < grid.size(); ++i)
            csv.add({format_real(s.epsilon_grid[i]), format_real(s.slope_at_origin[i]),
                     s.renormalized[i] ? "true" : "false", std::isnan(s.L_used[i]) ? "" : format_real(s.L_used[i])});
        to_destination(v, "csv", out, [&](std::ostream& os) { write_csv(os, "blowup", v, csv); });
    }
    return 0;
}

Json optional_json(const std::optional<double>& o) { return o ? Json(*o) : Json(nullptr); }

int cmd_regime(const Values& v, std::ostream& out) {
    const double k = parse_real("k", v.at("k"));
    const double alpha = parse_real("alpha", v.at("alpha"));
    const auto r = classify_regime(k, alpha, noise_of(v).sigma());
    const auto& c = r.coefficients;
    Json j;
    j["version"] = kVersion;
    j["config"] = config_json("regime", v);
    j["k"] = r.k;
    j["alpha"] = r.alpha;
    j["sigma"] = r.sigma;
    j["regime"] = std::string(to_string(r.regime));
    j["limit_slope"] = optional_json(r.limit_slope);
    j["exponent"] = r.exponent;
    j["prefactor"] = optional_json(r.prefactor);
    j["coefficient_ratio_b3"] = optional_json(r.coefficient_ratio_b3);
    j["predicted_rate_description"] = r.predicted_rate_description;
    j["coefficients"] = {{"a1", c.a1},
                         {"a2", c.a2},
                         {"a3", c.a3},
                         {"a4", c.a4},
                         {"abar1", c.abar1},
                         {"a5", c.a5},
                         {"a2_over_a4", c.a2_over_a4},
                         {"a1_over_a4", c.a1_over_a4},
                         {"a1_over_a3", c.a1_over_a3},
                         {"limit_used", c.limit_used},
                         {"singular_factors", c.singular_factors}};
    to_destination(v, "out", out, [&](std::ostream& os) { write_json(os, j); });
    return 0;
}

int cmd_limit(const Values& v, std::ostream& out) {
    const double t = parse_real("t", v.at("t"));
    const double x = parse_real("x", v.at("x"));
    std::vector<double> seq;
    if (v.at("sigma-seq").empty()) {
        seq = default_sigma_sequence(10);
    } else {
        for (const auto& part : split(v.at("sigma-seq"), ',')) seq.push_back(parse_real("sigma-seq", part));
    }
    const auto f = density_of(v);
    const auto vel = velocity_of(v);
    const auto conv = sigma_convergence(f, vel, t, x, seq);
    Csv csv;
    csv.comments.push_back(std::string("monotone = ") + (conv.monotone ? "true" : "false"));
    csv.comments.push_back("fitted_order = " + format_real(conv.fitted_order));
    csv.columns = {"sigma", "u_hat", "limit", "error"};
    for (const auto& p : conv.points)
        csv.add({format_real(p.sigma), format_real(p.u_hat), format_real(p.limit), format_real(p.error)});
    to_destination(v, "out", out, [&](std::ostream& os) { write_csv(os, "limit", v, csv); });

    if (!v.at("residuals").empty()) {
        const auto noise = noise_of(v);
        struct Row {
            double t, x, u, cont, fp, kin, burg;
        };
        std::vector<std::pair<double, double>> pts;
        for (double tt : {0.6 * t, 0.8 * t, t, 1.2 * t, 1.4 * t})
            for (double dx : {-0.5, -0.25, 0.0, 0.25, 0.5}) pts.emplace_back(tt, x + dx);
        const auto rows = parallel_map<Row>(pts.size(), [&](std::size_t i) {
            const auto [tt, xx] = pts[i];
            const double u = conditional_mean(tt, xx, f, vel, noise).u_hat + 0.25;
            double burg = std::nan("");
            try {
                burg = burgers_residual(vel, tt, xx).normalized;
            } catch (const MultiRootError&) {
            }
            return Row{tt,
                       xx,
                       u,
                       continuity_residual(tt, xx, f, vel, noise).normalized,
                       fokker_planck_residual(tt, {xx, u}, f, vel, noise).normalized,
                       kinetic_acceleration_check(tt, xx, u, f, vel, noise).normalized,
                       burg};
        });
        Csv res;
        res.columns = {"t", "x", "u", "continuity", "fokker_planck", "kinetic", "burgers"};
        for (const auto& r : rows)
            res.add({format_real(r.t), format_real(r.x), format_real(r.u), format_real(r.cont), format_real(r.fp),
                     format_real(r.kin), format_real(r.burg)});
        to_destination(v, "residuals", out, [&](std::ostream& os) { write_csv(os, "limit", v, res); });
    }
    return 0;
}

int cmd_burgers(const Values& v, std::ostream& out) {
    const double t = parse_real("t", v.at("t"));
    const double x = parse_real("x", v.at("x"));
    if (!(t >= 0.0)) throw ConfigError("--t must be >= 0");
    const auto outcome = solve_characteristics(velocity_of(v), t, x);
    Json j;
    j["version"] = kVersion;
    j["config"] = config_json("burgers", v);
    std::visit(
        [&](const auto& o) {
            using O = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<O, UniqueRoot>) {
                j["outcome"] = "unique";
                j["u"] = o.u;
                j["s"] = o.s;
            } else if constexpr (std::is_same_v<O, MultiRoot>) {
                j["outcome"] = "multi_root";
                j["count"] = o.count;
                j["roots"] = o.roots;
                j["crossed"] = o.crossed;
                j["focused"] = o.focused;
            } else {
                j["outcome"] = "no_root";
            }
        },
        outcome);
    to_destination(v, "out", out, [&](std::ostream& os) { write_json(os, j); });
    return 0;
}

int cmd_validate(const Values& v, std::ostream& out) {
    validation::SuiteOptions opts;
    opts.seed = parse_count("seed", v.at("seed"));
    opts.mc_samples = parse_count("samples", v.at("samples"));
    const std::filesystem::path dir = v.at("out-dir");
    std::filesystem::create_directories(dir);
    const auto results = validation::run_suite(opts);

    bool ok = true;
    Json checks = Json::array();
    for (const auto& r : results) {
        ok = ok && (r.passed || r.report_only);
        Json metrics;
        for (const auto& [name, value] : r.metrics) metrics[name] = value;
        checks.push_back({{"id", r.id},
                          {"title", r.title},
                          {"passed", r.passed},
                          {"report_only", r.report_only},
                          {"detail", r.detail},
                          {"metrics", metrics}});
        out << (r.report_only ? "REPORT" : (r.passed ? "PASS  " : "FAIL  ")) << " [" << r.id << "] " << r.title
            << ": " << r.detail << "\n";
        for (const auto& table : r.tables) {
            Csv csv;
            csv.comments.push_back("check = " + r.id);
            csv.columns = table.columns;
            for (const auto& row : table.rows) {
                std::vector<std::string> cells;
                for (double d : row) cells.push_back(format_real(d));
                csv.add(std::move(cells));
            }
            std::ofstream file(dir / (table.name + ".csv"), std::ios::binary);
            if (!file) throw ConfigError("cannot write into '" + dir.string() + "'");
            write_csv(file, "validate", v, csv);
        }
    }
    Json summary;
    summary["version"] = kVersion;
    summary["config"] = config_json("validate", v);
    summary["passed"] = ok;
    summary["checks"] = checks;
    std::ofstream file(dir / "summary.json", std::ios::binary);
    if (!file) throw ConfigError("cannot write into '" + dir.string() + "'");
    write_json(file, summary);
    out << (ok ? "validation passed" : "validation FAILED") << "\n";
    return ok ? 0 : 3;
}

// ------------------------------------------------------------- arguments

struct Command {
    std::string name;
    std::string help;
    std::vector<std::pair<std::string, std::string>> keys;  // name, default
    int (*body)(const Values&, std::ostream&);
};

const std::vector<std::pair<std::string, std::string>> kModel = {
    {"sigma", "1"}, {"velocity", "linear:-1"}, {"density", "uniform"}};

std::vector<Command> commands() {
    auto with_model = [](std::vector<std::pair<std::string, std::string>> keys) {
        keys.insert(keys.end(), kModel.begin(), kModel.end());
        keys.emplace_back("out", "");
        return keys;
    };
    return {
        {"eval", "one conditional-mean sample as JSON", with_model({{"t", "0.5"}, {"x", "1"}}), cmd_eval},
        {"sweep", "CSV of samples over a (t, x) grid",
         with_model({{"t-grid", "0.1:0.9:5"}, {"x-grid", "-2:2:5"}}), cmd_sweep},
        {"mc", "exact Monte Carlo estimates with the quadrature alongside",
         with_model({{"t", "0.5"},
                     {"x-range", "-2:2"},
                     {"bins", "41"},
                     {"samples", "1000000"},
                     {"seed", "0"},
                     {"bandwidth", ""},
                     {"L", ""}}),
         cmd_mc},
        {"blowup", "slope at the origin approaching the critical time",
         {{"k", "0"}, {"alpha", "-1"}, {"sigma", "1"}, {"eps-decades", "1:7"}, {"out", ""}, {"csv", ""}},
         cmd_blowup},
        {"regime", "predicted blowup regime for f = (1+x^2)^k, u0 = alpha x",
         {{"k", "-2"}, {"alpha", "-1"}, {"sigma", "1"}, {"out", ""}}, cmd_regime},
        {"limit", "sigma -> 0 convergence and residual tables",
         {{"t", "0.5"},
          {"x", "1"},
          {"sigma", "1"},
          {"velocity", "linear:-1"},
          {"density", "gaussian:1"},
          {"sigma-seq", ""},
          {"out", ""},
          {"residuals", ""}},
         cmd_limit},
        {"burgers", "characteristic solution of the unperturbed problem",
         {{"t", "0.5"}, {"x", "1"}, {"velocity", "linear:-1"}, {"out", ""}}, cmd_burgers},
        {"validate", "closed-form and cross-oracle checks",
         {{"out-dir", "validate_out"}, {"seed", "20240607"}, {"samples", "1000000"}}, cmd_validate},
    };
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// Pulls --config out of the arguments and appends every key of the file
// that the command line does not already set.
void apply_config_file(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::string line;
    int lineno = 0;
    std::vector<std::string> injected;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(text).substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        const auto value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        if (!has_flag(args, key)) {
            injected.push_back("--" + key);
            injected.push_back(value);
        }
    }
    args.insert(args.end(), injected.begin(), injected.end());
}

void write_error(std::ostream& err, std::string_view kind, const std::string& message) {
    Json j;
    j["error"] = std::string(kind);
    j["message"] = message;
    err << j.dump() << "\n";
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        apply_config_file(args);
    } catch (const ConfigError& e) {
        write_error(err, to_string(e.kind()), e.what());
        return 2;
    }

    CLI::App app{"Conditional-mean velocity of a Langevin-perturbed Burgers fluid"};
    app.name("gradstorm");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    const auto cmds = commands();
    std::vector<Values> values(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        for (const auto& [key, def] : cmds[i].keys) {
            values[i][key] = def;
            sub->add_option("--" + key, values[i][key])->capture_default_str();
        }
        subs.push_back(sub);
    }

    std::vector<const char*> argv2 = {argc > 0 ? argv[0] : "gradstorm"};
    for (const auto& a : args) argv2.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        write_error(err, to_string(ErrorKind::Config), e.what());
        return 2;
    }

    for (std::size_t i = 0; i < cmds.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            return cmds[i].body(values[i], out);
        } catch (const ConfigError& e) {
            write_error(err, to_string(e.kind()), e.what());
            return 2;
        } catch (const InvalidArgument& e) {
            // Out-of-domain parameters come from the user's configuration.
            write_error(err, to_string(ErrorKind::Config), e.what());
            return 2;
        } catch (const Error& e) {
            write_error(err, to_string(e.kind()), e.what());
            return 1;
        } catch (const std::exception& e) {
            write_error(err, "internal", e.what());
            return 1;
        }
    }
    write_error(err, to_string(ErrorKind::Config), "no subcommand");
    return 2;
}

}  // namespace gradstorm::cli
