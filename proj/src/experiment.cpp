#include "fastrd/experiment.hpp"

#include "fastrd/csv.hpp"
#include "fastrd/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace fastrd {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    ~Reader() = default;

    /// Reject keys that were never read.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(path_ + "/" + it.key(), "unknown field");
            }
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string field(const std::string& key) const { return path_ + "/" + key; }

    double number(const std::string& key, std::optional<double> fallback = {}) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "missing");
        }
        const json& v = raw(key);
        if (!v.is_number()) {
            throw ConfigError(field(key), "expected a number");
        }
        return v.get<double>();
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = {}) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "missing");
        }
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            if (v.is_number_float() && v.get<double>() >= 0 &&
                v.get<double>() == std::floor(v.get<double>()) && v.get<double>() < 9e15) {
                return static_cast<std::size_t>(v.get<double>());
            }
            throw ConfigError(field(key), "expected a nonnegative integer");
        }
        return v.get<std::size_t>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = {}) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "missing");
        }
        const json& v = raw(key);
        if (!v.is_string()) {
            throw ConfigError(field(key), "expected a string");
        }
        return v.get<std::string>();
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) {
            throw ConfigError(field(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) {
            throw ConfigError(field(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                throw ConfigError(field(key) + "/" + std::to_string(i), "expected a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Reader child(const std::string& key) { return Reader(raw(key), field(key)); }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

TimeSpec parse_time(Reader r) {
    TimeSpec t;
    t.final_time = r.number("final_time");
    t.scheme = r.text("scheme", std::string("uniform"));
    t.steps = r.count("steps", std::size_t{1});
    t.initial_step = r.number("initial_step", 1e-8);
    t.growth = r.number("growth", 1.05);
    if (t.scheme != "uniform" && t.scheme != "ramped") {
        throw ConfigError(r.field("scheme"), "expected \"uniform\" or \"ramped\"");
    }
    r.finish();
    return t;
}

json time_to_json(const TimeSpec& t) {
    return json{{"final_time", t.final_time},
                {"scheme", t.scheme},
                {"steps", t.steps},
                {"initial_step", t.initial_step},
                {"growth", t.growth}};
}

KineticsSpec parse_kinetics(Reader r) {
    KineticsSpec k;
    k.name = r.text("name");
    if (k.name == "dimerisation") {
        auto& d = k.dimerisation;
        d.k1 = r.number("k1", d.k1);
        d.k2 = r.number("k2", d.k2);
        d.a = r.number("a", d.a);
        d.b = r.number("b", d.b);
    } else if (k.name == "power-law") {
        auto& p = k.power_law;
        p.alpha = r.number("alpha", p.alpha);
        p.beta = r.number("beta", p.beta);
        p.c_a = r.number("c_a", p.c_a);
        p.p = r.number("p", p.p);
        p.c_b = r.number("c_b", p.c_b);
        p.q = r.number("q", p.q);
        p.a = r.number("a", p.a);
        p.b = r.number("b", p.b);
    } else {
        throw ConfigError(r.field("name"), "unknown kinetics '" + k.name +
                                               "' (expected \"dimerisation\" or \"power-law\")");
    }
    r.finish();
    return k;
}

json kinetics_to_json(const KineticsSpec& k) {
    if (k.name == "dimerisation") {
        const auto& d = k.dimerisation;
        return json{{"name", k.name}, {"k1", d.k1}, {"k2", d.k2}, {"a", d.a}, {"b", d.b}};
    }
    const auto& p = k.power_law;
    return json{{"name", k.name}, {"alpha", p.alpha}, {"beta", p.beta}, {"c_a", p.c_a},
                {"p", p.p},       {"c_b", p.c_b},     {"q", p.q},       {"a", p.a},
                {"b", p.b}};
}

InitialSpec parse_initial(Reader r) {
    InitialSpec s;
    s.preset = r.text("preset");
    if (s.preset == "dimerisation") {
        // no parameters
    } else if (s.preset == "constant") {
        s.u = r.number("u");
        s.v = r.number("v");
    } else if (s.preset == "table") {
        s.x = r.numbers("x");
        s.u_samples = r.numbers("u");
        s.v_samples = r.numbers("v");
    } else {
        throw ConfigError(r.field("preset"), "unknown initial-condition preset '" + s.preset +
                                                 "' (expected dimerisation, constant or table)");
    }
    r.finish();
    return s;
}

json initial_to_json(const InitialSpec& s) {
    if (s.preset == "constant") {
        return json{{"preset", s.preset}, {"u", s.u}, {"v", s.v}};
    }
    if (s.preset == "table") {
        return json{{"preset", s.preset}, {"x", s.x}, {"u", s.u_samples}, {"v", s.v_samples}};
    }
    return json{{"preset", s.preset}};
}

SolverConfig parse_solver(Reader r) {
    SolverConfig c;
    c.newton_tol = r.number("newton_tol", c.newton_tol);
    c.newton_max_iter = static_cast<int>(r.count("newton_max_iter", static_cast<std::size_t>(c.newton_max_iter)));
    c.linesearch = r.flag("linesearch", c.linesearch);
    try {
        c.linear_solver = linear_solver_from_string(r.text("linear_solver", to_string(c.linear_solver)));
    } catch (const InvalidArgument& e) {
        throw ConfigError(r.field("linear_solver"), e.what());
    }
    c.linear_tol = r.number("linear_tol", c.linear_tol);
    c.linear_max_iter = static_cast<int>(r.count("linear_max_iter", static_cast<std::size_t>(c.linear_max_iter)));
    c.fallback_sweeps = static_cast<int>(r.count("fallback_sweeps", static_cast<std::size_t>(c.fallback_sweeps)));
    r.finish();
    return c;
}

json solver_to_json(const SolverConfig& c) {
    return json{{"newton_tol", c.newton_tol},
                {"newton_max_iter", c.newton_max_iter},
                {"linesearch", c.linesearch},
                {"linear_solver", to_string(c.linear_solver)},
                {"linear_tol", c.linear_tol},
                {"linear_max_iter", c.linear_max_iter},
                {"fallback_sweeps", c.fallback_sweeps}};
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["mesh"] = json{{"length", c.mesh.length}, {"cells", c.mesh.cells}};
    j["time"] = time_to_json(c.time);
    if (c.limit_time) {
        j["limit_time"] = time_to_json(*c.limit_time);
    }
    j["kinetics"] = kinetics_to_json(c.kinetics);
    j["k"] = c.k_values;
    j["initial"] = initial_to_json(c.initial);
    j["quadrature_order"] = c.quadrature_order;
    j["solver"] = solver_to_json(c.solver);
    j["run_limit"] = c.run_limit;
    j["output"] = json{{"every", c.output.every}, {"mesh_csv", c.output.mesh_csv}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    Reader r(j, "");
    ExperimentConfig c;
    c.name = r.text("name", std::string("custom"));
    {
        Reader m = r.child("mesh");
        c.mesh.length = m.number("length");
        c.mesh.cells = m.count("cells");
        m.finish();
    }
    c.time = parse_time(r.child("time"));
    if (r.has("limit_time")) {
        c.limit_time = parse_time(r.child("limit_time"));
    }
    c.kinetics = parse_kinetics(r.child("kinetics"));
    if (r.has("k")) {
        const json& k = r.raw("k");
        if (k.is_number()) {
            c.k_values = {k.get<double>()};
        } else {
            c.k_values = r.numbers("k");
        }
    }
    c.initial = parse_initial(r.child("initial"));
    c.quadrature_order = static_cast<int>(r.count("quadrature_order", std::size_t{1}));
    if (r.has("solver")) {
        c.solver = parse_solver(r.child("solver"));
    }
    c.run_limit = r.flag("run_limit", true);
    if (r.has("output")) {
        Reader o = r.child("output");
        c.output.every = o.count("every", std::size_t{1});
        c.output.mesh_csv = o.flag("mesh_csv", false);
        o.finish();
    }
    r.finish();
    c.validate();
    return c;
}

// ---------------------------------------------------------------- profiles

double dimerisation_u0(double x) {
    if (x <= 0.03) {
        return 0.0;
    }
    return 0.5 * std::sin(50.0 * std::numbers::pi / 7.0 * (x - 0.03));
}

double dimerisation_v0(double x) {
    if (x >= 0.07) {
        return 0.0;
    }
    return 0.25 * std::cos(50.0 * std::numbers::pi / 7.0 * x);
}

Profile interpolate(const std::vector<double>& xs, const std::vector<double>& ys) {
    return [xs, ys](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(std::distance(xs.begin(), it));
        const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + t * (ys[i] - ys[i - 1]);
    };
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) {
        throw std::runtime_error("cannot open " + p.string() + " for writing");
    }
    return os;
}

std::vector<std::size_t> output_levels(std::size_t every, std::size_t n_levels) {
    std::vector<std::size_t> levels;
    if (every == 0) every = 1;
    for (std::size_t l = 0; l < n_levels; l += every) {
        levels.push_back(l);
    }
    return levels;
}

EquilibriumPair reference_for(const Mesh& mesh, const Kinetics& kin, const State& initial,
                              std::vector<std::string>& warnings) {
    const double mean_u = mesh.integrate(initial.u) / mesh.total_measure();
    if (mean_u > 0.0) {
        return {mean_u, kin.eta(mean_u)};
    }
    const double mean_w = conserved_mass(mesh, kin, initial) / mesh.total_measure();
    if (mean_w > 0.0) {
        const double a = kin.conserved_inverse(mean_w);
        return {a, kin.eta(a)};
    }
    warnings.emplace_back("initial data vanish identically; Lyapunov functional disabled");
    return {0.0, 0.0};
}

double max_relative_drift(const std::vector<double>& masses) {
    double drift = 0.0;
    for (double m : masses) {
        drift = std::max(drift, std::abs(m - masses.front()) / std::max(std::abs(masses.front()), 1e-300));
    }
    return drift;
}

} // namespace

// ---------------------------------------------------------------- specs

TimeGrid TimeSpec::build() const {
    if (scheme == "ramped") {
        return build_time_grid_ramped(initial_step, growth, final_time);
    }
    return build_time_grid_uniform(final_time, steps);
}

Kinetics KineticsSpec::build(double k) const {
    if (name == "dimerisation") {
        auto d = dimerisation;
        d.k = k;
        return d.kinetics();
    }
    if (name == "power-law") {
        auto p = power_law;
        p.k = k;
        return p.kinetics();
    }
    throw InvalidArgument("unknown kinetics '" + name + "'");
}

std::optional<DimerisationConstants> KineticsSpec::closed_form(double k) const {
    if (name != "dimerisation") {
        return std::nullopt;
    }
    auto d = dimerisation;
    d.k = k;
    return d;
}

Profile InitialSpec::u_profile() const {
    if (preset == "dimerisation") return dimerisation_u0;
    if (preset == "constant") {
        const double c = u;
        return [c](double) { return c; };
    }
    return interpolate(x, u_samples);
}

Profile InitialSpec::v_profile() const {
    if (preset == "dimerisation") return dimerisation_v0;
    if (preset == "constant") {
        const double c = v;
        return [c](double) { return c; };
    }
    return interpolate(x, v_samples);
}

void ExperimentConfig::validate() const {
    if (!(mesh.length > 0.0)) throw ConfigError("/mesh/length", "must be positive");
    if (mesh.cells == 0) throw ConfigError("/mesh/cells", "must be at least 1");
    auto check_time = [](const TimeSpec& t, const std::string& path) {
        if (!(t.final_time > 0.0)) throw ConfigError(path + "/final_time", "must be positive");
        if (t.scheme == "uniform" && t.steps == 0) throw ConfigError(path + "/steps", "must be at least 1");
        if (t.scheme == "ramped") {
            if (!(t.initial_step > 0.0) || !(t.initial_step < t.final_time)) {
                throw ConfigError(path + "/initial_step", "must lie in (0, final_time)");
            }
            if (!(t.growth >= 1.0)) throw ConfigError(path + "/growth", "must be >= 1");
        }
    };
    check_time(time, "/time");
    if (limit_time) {
        check_time(*limit_time, "/limit_time");
        if (limit_time->final_time != time.final_time) {
            throw ConfigError("/limit_time/final_time", "must equal /time/final_time");
        }
    }
    if (k_values.empty()) throw ConfigError("/k", "sweep list must not be empty");
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        if (!(k_values[i] >= 0.0) || !std::isfinite(k_values[i])) {
            throw ConfigError("/k/" + std::to_string(i), "must be finite and nonnegative");
        }
    }
    try {
        (void)kinetics.build(k_values.front());
    } catch (const InvalidArgument& e) {
        throw ConfigError("/kinetics", e.what());
    }
    if (initial.preset == "constant" && (!(initial.u >= 0.0) || !(initial.v >= 0.0))) {
        throw ConfigError("/initial", "constant data must be nonnegative");
    }
    if (initial.preset == "table") {
        if (initial.x.empty() || initial.x.size() != initial.u_samples.size() ||
            initial.x.size() != initial.v_samples.size()) {
            throw ConfigError("/initial", "x, u and v must be nonempty arrays of equal length");
        }
        for (std::size_t i = 1; i < initial.x.size(); ++i) {
            if (!(initial.x[i] > initial.x[i - 1])) {
                throw ConfigError("/initial/x", "sample positions must be strictly increasing");
            }
        }
        for (std::size_t i = 0; i < initial.x.size(); ++i) {
            if (!(initial.u_samples[i] >= 0.0) || !(initial.v_samples[i] >= 0.0)) {
                throw ConfigError("/initial", "sample values must be nonnegative");
            }
        }
    }
    if (quadrature_order < 1 || quadrature_order > 64) {
        throw ConfigError("/quadrature_order", "must be in [1, 64]");
    }
    try {
        solver.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError("/solver", e.what());
    }
    if (output.every == 0) throw ConfigError("/output/every", "must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(
                                         std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
        throw ConfigError("", "JSON parse error at line " + std::to_string(line) + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("", e.what());
    }
}

std::string serialize_config(const ExperimentConfig& config) {
    return config_to_json(config).dump(2);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("", "cannot read " + path.string());
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::string> preset_names() {
    return {"dimerisation-short", "dimerisation-long", "dimerisation-sweep"};
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.mesh = {0.1, 50};
    c.kinetics.name = "dimerisation";
    c.initial.preset = "dimerisation";
    c.time.scheme = "ramped";
    c.time.initial_step = 1e-8;
    c.time.growth = 1.05;
    TimeSpec limit = c.time;
    limit.initial_step = 1e-6;
    if (name == "dimerisation-short") {
        c.time.final_time = 1e5;
        c.k_values = {1.0};
        c.output.every = 10;
    } else if (name == "dimerisation-long") {
        c.time.final_time = 1e11;
        c.k_values = {1.0};
        c.output.every = 10;
    } else if (name == "dimerisation-sweep") {
        c.time.final_time = 1e11;
        c.k_values = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0};
        c.output.every = 50;
    } else {
        throw ConfigError("", "unknown preset '" + name + "'");
    }
    limit.final_time = c.time.final_time;
    c.limit_time = limit;
    c.validate();
    return c;
}

// ---------------------------------------------------------------- running

WTrajectory run_limit_problem(const ExperimentConfig& config) {
    const Mesh mesh = build_uniform_1d(config.mesh.length, config.mesh.cells);
    const Kinetics kin = config.kinetics.build(config.k_values.front());
    const TimeGrid grid = config.limit_time ? config.limit_time->build() : config.time.build();
    const WState w0 = project_initial_w(mesh, kin, config.initial.u_profile(),
                                        config.initial.v_profile(), config.quadrature_order);
    return integrate_w(mesh, kin, grid, w0, config.solver,
                       output_levels(config.output.every, grid.num_levels()));
}

RunResult run_experiment(const ExperimentConfig& config, double k, const WTrajectory* limit) {
    config.validate();
    RunResult result{k, build_uniform_1d(config.mesh.length, config.mesh.cells), {}, {}, {}, {}};
    const Mesh& mesh = result.mesh;
    const Kinetics kin = config.kinetics.build(k);
    for (auto& p : kin.validate()) {
        result.warnings.push_back("kinetics: " + p);
    }
    const TimeGrid grid = config.time.build();
    const State initial = project_initial(mesh, config.initial.u_profile(),
                                          config.initial.v_profile(), config.quadrature_order);

    DiagnosticsAccumulator acc(mesh, kin, reference_for(mesh, kin, initial, result.warnings));
    result.trajectory = integrate(mesh, kin, grid, initial, config.solver,
                                  output_levels(config.output.every, grid.num_levels()),
                                  [&](const State& s) { acc.observe(s); });
    result.report = std::move(acc.report());

    if (config.run_limit) {
        if (limit != nullptr) {
            result.limit_trajectory = *limit;
        } else {
            result.limit_trajectory = run_limit_problem(config);
        }
        std::vector<double> masses;
        for (const auto& ws : result.limit_trajectory.states) {
            masses.push_back(mesh.integrate(ws.w));
        }
        result.report.limit_mass_drift = max_relative_drift(masses);
        result.report.limit = compare_to_limit(mesh, result.trajectory.states.back(),
                                               result.limit_trajectory.states.back(), kin,
                                               config.kinetics.closed_form(k));
    }
    return result;
}

namespace {

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config,
                    const std::string& command, const std::string& started, double seconds,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    auto os = open_out(path);
    os << "# fastrd run manifest\n"
       << "version=" << kVersion << '\n'
       << "command=" << command << '\n'
       << "started_utc=" << started << '\n'
       << "elapsed_seconds=" << format_number(seconds) << '\n';
    for (const auto& [k, v] : extra) {
        os << k << '=' << v << '\n';
    }
    os << "config=" << config_to_json(config).dump() << '\n';
}

} // namespace

RunResult run_to_directory(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::ostream& log) {
    if (config.k_values.size() != 1) {
        throw ConfigError("/k", "run takes a single k value; use sweep for lists");
    }
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    RunResult result = run_experiment(config, config.k_values.front());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(out_dir);
    {
        auto os = open_out(out_dir / "trajectory.csv");
        write_trajectory_csv(result.mesh, result.trajectory, os);
    }
    {
        auto os = open_out(out_dir / "stats.csv");
        write_stats_csv(result.trajectory.stats, os);
    }
    if (config.run_limit) {
        auto os = open_out(out_dir / "trajectory_limit.csv");
        write_w_trajectory_csv(result.mesh, result.limit_trajectory, os);
        auto os2 = open_out(out_dir / "stats_limit.csv");
        write_stats_csv(result.limit_trajectory.stats, os2);
    }
    {
        auto os = open_out(out_dir / "diagnostics.csv");
        write_diagnostics_csv(result.report, os);
    }
    if (config.output.mesh_csv) {
        auto os = open_out(out_dir / "mesh.csv");
        write_mesh_csv(result.mesh, os);
    }
    std::vector<std::pair<std::string, std::string>> extra{{"k", format_number(result.k)}};
    if (result.report.limit) {
        extra.emplace_back("J_u", format_number(result.report.limit->j_u));
        extra.emplace_back("J_v", format_number(result.report.limit->j_v));
    }
    write_manifest(out_dir / "manifest.txt", config, "run", started, seconds, extra);

    for (const auto& w : result.warnings) {
        log << "warning: " << w << '\n';
    }
    log << "run '" << config.name << "' k = " << format_number(result.k) << " finished in "
        << format_number(seconds) << " s\n";
    write_diagnostics_summary(result.report, log);
    return result;
}

namespace {

SweepRow summarize(const RunResult& r) {
    SweepRow row;
    row.k = r.k;
    if (r.report.limit) row.limit = *r.report.limit;
    if (!r.report.levels.empty()) {
        const auto& last = r.report.levels.back();
        row.gradient = {last.gradient_energy_u, last.gradient_energy_v};
        row.reaction_defect = last.reaction_defect;
        std::vector<double> masses;
        for (std::size_t i = 0; i < r.report.levels.size(); ++i) {
            masses.push_back(r.report.levels[i].mass_w);
            if (i > 0) {
                row.lyapunov_max_increase = std::max(
                    row.lyapunov_max_increase, r.report.levels[i].lyapunov - r.report.levels[i - 1].lyapunov);
            }
        }
        row.mass_drift = max_relative_drift(masses);
    }
    return row;
}

std::vector<RunResult> run_all(const ExperimentConfig& config, unsigned max_jobs,
                               const WTrajectory* limit) {
    const std::size_t n = config.k_values.size();
    if (max_jobs == 0) {
        max_jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    std::vector<std::optional<RunResult>> results(n);
    for (std::size_t start = 0; start < n; start += max_jobs) {
        std::vector<std::future<RunResult>> jobs;
        const std::size_t end = std::min(n, start + max_jobs);
        for (std::size_t i = start; i < end; ++i) {
            jobs.push_back(std::async(std::launch::async, [&config, limit, k = config.k_values[i]] {
                return run_experiment(config, k, limit);
            }));
        }
        for (std::size_t i = start; i < end; ++i) {
            results[i] = jobs[i - start].get();
        }
    }
    std::vector<RunResult> out;
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

} // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, unsigned max_jobs) {
    config.validate();
    std::optional<WTrajectory> limit;
    if (config.run_limit) {
        limit = run_limit_problem(config);
    }
    std::vector<SweepRow> rows;
    for (const auto& r : run_all(config, max_jobs, limit ? &*limit : nullptr)) {
        rows.push_back(summarize(r));
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "k,J_u,J_v,J_u_closed_form,J_v_closed_form,gradient_energy_u,gradient_energy_v,"
          "reaction_defect,lyapunov_max_increase,mass_drift\n";
    for (const auto& r : rows) {
        os << format_number(r.k) << ',' << format_number(r.limit.j_u) << ','
           << format_number(r.limit.j_v) << ',' << format_number(r.limit.j_u_closed_form) << ','
           << format_number(r.limit.j_v_closed_form) << ',' << format_number(r.gradient.u) << ','
           << format_number(r.gradient.v) << ',' << format_number(r.reaction_defect) << ','
           << format_number(r.lyapunov_max_increase) << ',' << format_number(r.mass_drift) << '\n';
    }
}

std::vector<SweepRow> sweep_to_directory(const ExperimentConfig& config,
                                         const std::filesystem::path& out_dir, std::ostream& log) {
    config.validate();
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<WTrajectory> limit;
    if (config.run_limit) {
        limit = run_limit_problem(config);
    }
    const auto results = run_all(config, 0, limit ? &*limit : nullptr);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(out_dir);
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto dir = out_dir / ("k_" + std::to_string(i));
        std::filesystem::create_directories(dir);
        auto os = open_out(dir / "diagnostics.csv");
        write_diagnostics_csv(results[i].report, os);
        auto fs = open_out(dir / "final_state.csv");
        Trajectory last;
        last.states.push_back(results[i].trajectory.states.back());
        write_trajectory_csv(results[i].mesh, last, fs);
        rows.push_back(summarize(results[i]));
        for (const auto& w : results[i].warnings) {
            log << "warning (k = " << format_number(results[i].k) << "): " << w << '\n';
        }
    }
    if (limit) {
        auto os = open_out(out_dir / "trajectory_limit.csv");
        write_w_trajectory_csv(results.front().mesh, *limit, os);
    }
    {
        auto os = open_out(out_dir / "sweep.csv");
        write_sweep_csv(rows, os);
    }
    write_manifest(out_dir / "manifest.txt", config, "sweep", started, seconds, {});

    log << "sweep '" << config.name << "' over " << rows.size() << " k values finished in "
        << format_number(seconds) << " s\n";
    log << "        k          J_u          J_v     J_u(cf)     J_v(cf)\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%9.1e  %11.4e  %11.4e  %10.3e  %10.3e\n", r.k, r.limit.j_u,
                      r.limit.j_v, r.limit.j_u_closed_form, r.limit.j_v_closed_form);
        log << buf;
    }
    return rows;
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& trajectory_csv,
                                                  const std::vector<std::size_t>& levels,
                                                  const std::filesystem::path& out_dir) {
    std::ifstream is(trajectory_csv);
    if (!is) {
        throw InvalidArgument("cannot read " + trajectory_csv.string());
    }
    const CsvTable table = read_csv(is);
    const int c_level = table.column("level");
    const int c_x = table.column("x");
    std::vector<int> values;
    std::string header;
    if (table.column("u") >= 0 && table.column("v") >= 0) {
        values = {table.column("u"), table.column("v")};
        header = "# x u v";
    } else if (table.column("w") >= 0) {
        values = {table.column("w")};
        header = "# x w";
    }
    if (c_level < 0 || c_x < 0 || values.empty()) {
        throw InvalidArgument(trajectory_csv.string() +
                              ": expected columns level,x and either u,v or w");
    }
    if (table.rows.empty()) {
        throw InvalidArgument(trajectory_csv.string() + ": trajectory is empty");
    }
    std::map<std::size_t, std::vector<const std::vector<double>*>> by_level;
    for (const auto& row : table.rows) {
        const double l = row[static_cast<std::size_t>(c_level)];
        if (!(l >= 0.0) || l != std::floor(l)) {
            throw InvalidArgument(trajectory_csv.string() + ": invalid level value");
        }
        by_level[static_cast<std::size_t>(l)].push_back(&row);
    }
    std::vector<std::size_t> wanted = levels;
    if (wanted.empty()) {
        for (const auto& [l, rows] : by_level) wanted.push_back(l);
    }
    for (std::size_t l : wanted) {
        if (!by_level.count(l)) {
            throw InvalidArgument("level " + std::to_string(l) + " not present in " +
                                  trajectory_csv.string());
        }
    }

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (std::size_t l : wanted) {
        auto rows = by_level[l];
        std::stable_sort(rows.begin(), rows.end(), [&](auto* a, auto* b) {
            return (*a)[static_cast<std::size_t>(c_x)] < (*b)[static_cast<std::size_t>(c_x)];
        });
        const auto path = out_dir / ("level_" + std::to_string(l) + ".dat");
        auto os = open_out(path);
        os << header << '\n';
        for (const auto* row : rows) {
            os << format_number((*row)[static_cast<std::size_t>(c_x)]);
            for (int c : values) {
                os << ' ' << format_number((*row)[static_cast<std::size_t>(c)]);
            }
            os << '\n';
        }
        written.push_back(path);
    }
    return written;
}

ExperimentConfig config_from_manifest(const std::filesystem::path& manifest) {
    std::ifstream is(manifest);
    if (!is) {
        throw ConfigError("", "cannot read " + manifest.string());
    }
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("config=", 0) == 0) {
            return parse_config(line.substr(7));
        }
    }
    throw ConfigError("", manifest.string() + " has no config= line");
}

} // namespace fastrd
