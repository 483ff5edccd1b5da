// Command-line driver for the fastrd solver.

#include "fastrd/errors.hpp"
#include "fastrd/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Source {
    std::string config;
    std::string preset;
    std::string manifest;
};

void add_source(CLI::App* cmd, Source& src) {
    auto* c = cmd->add_option("-c,--config", src.config, "JSON experiment config")->check(CLI::ExistingFile);
    auto* p = cmd->add_option("-p,--preset", src.preset, "built-in experiment preset");
    auto* m = cmd->add_option("-m,--manifest", src.manifest, "rerun the config stored in a run manifest")
                  ->check(CLI::ExistingFile);
    c->excludes(p)->excludes(m);
    p->excludes(m);
}

fastrd::ExperimentConfig resolve(const Source& src) {
    if (!src.config.empty()) return fastrd::load_config(src.config);
    if (!src.manifest.empty()) return fastrd::config_from_manifest(src.manifest);
    if (!src.preset.empty()) return fastrd::preset_config(src.preset);
    throw fastrd::ConfigError("", "one of --config, --preset or --manifest is required");
}

/// Log sink that discards everything unless --verbose was given.
class NullBuffer : public std::streambuf {
protected:
    int overflow(int c) override { return c; }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume solver for reaction-diffusion systems with a fast reversible reaction"};
    app.set_version_flag("--version", std::string(fastrd::kVersion));
    app.require_subcommand(1);

    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "print progress and diagnostics summaries");
    app.add_flag("-q,--quiet", quiet, "suppress the summary");

    Source run_src;
    std::string run_out = "out";
    bool mesh_csv = false;
    double run_k = -1.0;
    auto* run = app.add_subcommand("run", "integrate one configuration and write its artifacts");
    add_source(run, run_src);
    run->add_option("-o,--output", run_out, "output directory")->capture_default_str();
    run->add_option("-k,--rate-factor", run_k, "override the rate factor k")->check(CLI::NonNegativeNumber);
    run->add_flag("--mesh-csv", mesh_csv, "also write mesh.csv");

    Source sweep_src;
    std::string sweep_out = "sweep";
    auto* sweep = app.add_subcommand("sweep", "run every k of the config in parallel");
    add_source(sweep, sweep_src);
    sweep->add_option("-o,--output", sweep_out, "output directory")->capture_default_str();

    std::string plot_in;
    std::string plot_out = "plot";
    std::vector<std::size_t> plot_levels;
    auto* plot = app.add_subcommand("plot-data", "split a trajectory CSV into per-level columnar files");
    plot->add_option("trajectory", plot_in, "trajectory.csv or trajectory_limit.csv")->required();
    plot->add_option("-o,--output", plot_out, "output directory")->capture_default_str();
    plot->add_option("-l,--levels", plot_levels, "levels to extract (default: all)");

    Source check_src;
    bool print = false;
    auto* check = app.add_subcommand("validate-config", "parse and validate a configuration");
    add_source(check, check_src);
    check->add_flag("--print", print, "print the normalized config");

    auto* presets = app.add_subcommand("presets", "list built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream& log = quiet ? null_stream : std::cout;

    try {
        if (*run) {
            auto cfg = resolve(run_src);
            if (run_k >= 0.0) cfg.k_values = {run_k};
            if (mesh_csv) cfg.output.mesh_csv = true;
            if (verbose) std::cerr << "running '" << cfg.name << "' into " << run_out << '\n';
            fastrd::run_to_directory(cfg, run_out, log);
        } else if (*sweep) {
            const auto cfg = resolve(sweep_src);
            if (verbose) std::cerr << "sweeping '" << cfg.name << "' into " << sweep_out << '\n';
            fastrd::sweep_to_directory(cfg, sweep_out, log);
        } else if (*plot) {
            const auto files = fastrd::emit_plot_data(plot_in, plot_levels, plot_out);
            log << "wrote " << files.size() << " file(s) to " << plot_out << '\n';
        } else if (*check) {
            const auto cfg = resolve(check_src);
            if (print) {
                std::cout << fastrd::serialize_config(cfg) << '\n';
            } else {
                log << "config '" << cfg.name << "' is valid\n";
            }
        } else if (*presets) {
            for (const auto& n : fastrd::preset_names()) std::cout << n << '\n';
        }
    } catch (const fastrd::ConfigError& e) {
        std::cerr << "config error";
        if (!e.field().empty()) std::cerr << " at " << e.field();
        std::cerr << ": " << e.what() << '\n';
        return 2;
    } catch (const fastrd::NumericalError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        if (verbose) {
            for (const auto& t : e.trace()) std::cerr << "  " << t << '\n';
        }
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
