#pragma once

#include "fastrd/diagnostics.hpp"
#include "fastrd/fvscheme.hpp"
#include "fastrd/kinetics.hpp"
#include "fastrd/limit.hpp"
#include "fastrd/mesh.hpp"
#include "fastrd/solver_config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fastrd {

inline constexpr const char* kVersion = "0.1.0";

struct MeshSpec {
    double length = 0.1;     ///< m
    std::size_t cells = 50;

    bool operator==(const MeshSpec&) const = default;
};

struct TimeSpec {
    double final_time = 1.0;     ///< s
    std::string scheme = "uniform";  ///< "uniform" | "ramped"
    std::size_t steps = 1;       ///< uniform only
    double initial_step = 1e-8;  ///< s, ramped only
    double growth = 1.05;        ///< ramped only

    TimeGrid build() const;
    bool operator==(const TimeSpec&) const = default;
};

struct KineticsSpec {
    std::string name = "dimerisation";  ///< "dimerisation" | "power-law"
    DimerisationConstants dimerisation;  ///< k1, k2 [L/mol/s-style constants], a, b [m²/s]
    PowerLawConstants power_law;

    Kinetics build(double k) const;
    std::optional<DimerisationConstants> closed_form(double k) const;
    bool operator==(const KineticsSpec&) const = default;
};

struct InitialSpec {
    std::string preset = "dimerisation";  ///< "dimerisation" | "constant" | "table"
    double u = 0.0;  ///< constant preset, mol/L
    double v = 0.0;
    std::vector<double> x;   ///< table preset: strictly increasing sample positions (m)
    std::vector<double> u_samples;
    std::vector<double> v_samples;

    Profile u_profile() const;
    Profile v_profile() const;
    bool operator==(const InitialSpec&) const = default;
};

struct OutputSpec {
    std::size_t every = 1;   ///< store every n-th level in trajectory CSVs (final always)
    bool mesh_csv = false;

    bool operator==(const OutputSpec&) const = default;
};

/// One experiment: a JSON document with SI units throughout.
struct ExperimentConfig {
    std::string name = "custom";
    MeshSpec mesh;
    TimeSpec time;
    std::optional<TimeSpec> limit_time;  ///< defaults to `time`
    KineticsSpec kinetics;
    std::vector<double> k_values{1.0};
    InitialSpec initial;
    int quadrature_order = 1;
    SolverConfig solver;
    bool run_limit = true;
    OutputSpec output;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Parse a JSON config; errors report the field path or the parse position.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

/// Everything produced by one coupled run (plus the limit run, if enabled).
struct RunResult {
    double k = 0.0;
    Mesh mesh;
    Trajectory trajectory;        ///< levels selected by output.every
    WTrajectory limit_trajectory;
    DiagnosticsReport report;
    std::vector<std::string> warnings;
};

/// In-memory run for rate factor `k`. `limit` may be supplied to reuse a
/// previously computed limit trajectory.
RunResult run_experiment(const ExperimentConfig& config, double k,
                         const WTrajectory* limit = nullptr);

/// Limit-problem run only.
WTrajectory run_limit_problem(const ExperimentConfig& config);

/// `run` subcommand: single k, writes trajectory.csv, trajectory_limit.csv,
/// stats.csv, stats_limit.csv, diagnostics.csv, manifest.txt (and mesh.csv
/// when requested) into `out_dir`.
RunResult run_to_directory(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::ostream& log);

struct SweepRow {
    double k = 0.0;
    LimitComparison limit;
    GradientEnergy gradient;
    double reaction_defect = 0.0;
    double lyapunov_max_increase = 0.0;
    double mass_drift = 0.0;
};

/// All k values, run as concurrent jobs sharing one limit trajectory.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, unsigned max_jobs = 0);

/// `sweep` subcommand: per-k diagnostics under k_<i>/ plus sweep.csv and
/// manifest.txt.
std::vector<SweepRow> sweep_to_directory(const ExperimentConfig& config,
                                         const std::filesystem::path& out_dir, std::ostream& log);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

/// Read a trajectory CSV (u/v or w schema) and write one whitespace-
/// separated file per requested level (`x u v` or `x w`). An empty level
/// list means every level. Nothing is written if validation fails.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& trajectory_csv,
                                                  const std::vector<std::size_t>& levels,
                                                  const std::filesystem::path& out_dir);

/// Config stored in a run manifest.
ExperimentConfig config_from_manifest(const std::filesystem::path& manifest);

} // namespace fastrd
