#include "cli.hpp"

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "deepgrid/config.hpp"
#include "deepgrid/experiment.hpp"
#include "deepgrid/snapshot.hpp"

namespace deepgrid {

namespace {

void apply_overrides(ExperimentConfig& cfg, const std::optional<std::size_t>& workers,
                     const std::optional<std::string>& out)
{
    if (workers) {
        cfg.workers = *workers;
    }
    if (out) {
        cfg.output_dir = *out;
    }
}

void print_summary(std::ostream& out, const ExperimentConfig& cfg, const std::vector<RunResult>& results)
{
    out << metrics_csv_header << '\n';
    for (const auto& r : results) {
        out << metrics_csv_row(cfg, r.replication, r.checkpoints.back()) << '\n';
    }
}

int run_command(const std::string& config_path, const std::optional<std::size_t>& workers,
                const std::optional<std::string>& out_dir, std::ostream& out)
{
    auto cfg = load_config(config_path);
    apply_overrides(cfg, workers, out_dir);
    cfg.validate();
    auto results = run_experiment(cfg);
    print_summary(out, cfg, results);
    return exit_ok;
}

int sweep_command(const std::string& config_path, const std::optional<std::size_t>& workers,
                  const std::optional<std::string>& out_dir, std::ostream& out)
{
    auto root = read_json_file(config_path);
    if (out_dir) {
        root["output_dir"] = *out_dir;
    }
    auto configs = expand_sweep(root);
    for (auto& cfg : configs) {
        apply_overrides(cfg, workers, std::nullopt);
        cfg.validate();
    }
    for (const auto& cfg : configs) {
        out << "# " << cfg.output_dir.string() << '\n';
        print_summary(out, cfg, run_experiment(cfg));
    }
    return exit_ok;
}

int metrics_command(const std::string& snapshot_path, const std::string& config_path, std::uint64_t evaluations,
                    std::ostream& out)
{
    auto cfg = load_config(config_path);
    cfg.validate();
    const auto problem = make_problem(cfg);
    const auto grid =
        load_grid_snapshot(snapshot_path, problem.geometry.cell_count(), cfg.algorithm.grid_depth());
    Rng rng = replication_stream(cfg, 0, "metrics");
    Checkpoint c;
    c.metrics = measure(grid, problem, cfg, cfg.noise, cfg.algorithm.in_cell_selector(), rng);
    c.metrics.evaluations_used = evaluations;
    out << metrics_csv_header << '\n' << metrics_csv_row(cfg, 0, c) << '\n';
    return exit_ok;
}

int validate_command(const std::string& config_path, std::ostream& out)
{
    auto root = read_json_file(config_path);
    const auto configs = expand_sweep(root);
    for (const auto& cfg : configs) {
        cfg.validate();
    }
    out << "ok: " << configs.size() << " experiment(s)\n";
    return exit_ok;
}

}  // namespace

int cli_main(int argc, char** argv)
{
    return cli_main(argc, argv, std::cout, std::cerr);
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Deep-Grid MAP-Elites and sampling baselines on noisy QD benchmarks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string snapshot_path;
    std::optional<std::size_t> workers;
    std::optional<std::string> out_dir;
    std::uint64_t evaluations = 0;

    auto* run = app.add_subcommand("run", "Run one experiment configuration");
    run->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    run->add_option("--workers", workers, "Replications run concurrently");
    run->add_option("--out", out_dir, "Output directory");

    auto* sweep = app.add_subcommand("sweep", "Run every variant x task combination of the sweep section");
    sweep->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    sweep->add_option("--workers", workers, "Replications run concurrently");
    sweep->add_option("--out", out_dir, "Output directory");

    auto* metrics = app.add_subcommand("metrics", "Recompute corrected-container metrics from a snapshot");
    metrics->add_option("--snapshot", snapshot_path, "Grid snapshot CSV")->required();
    metrics->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    metrics->add_option("--evaluations", evaluations, "Value for the evaluations column");

    auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
    validate->add_option("--config", config_path, "Experiment configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return exit_config_error;
    }

    try {
        if (run->parsed()) {
            return run_command(config_path, workers, out_dir, out);
        }
        if (sweep->parsed()) {
            return sweep_command(config_path, workers, out_dir, out);
        }
        if (metrics->parsed()) {
            return metrics_command(snapshot_path, config_path, evaluations, out);
        }
        return validate_command(config_path, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
}

}  // namespace deepgrid
