#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "deepgrid/algorithms.hpp"
#include "deepgrid/config.hpp"
#include "deepgrid/metrics.hpp"

namespace deepgrid {

struct Checkpoint {
    MetricsRecord metrics;
    double wallclock_seconds = 0.0;
};

struct RunResult {
    std::size_t replication = 0;
    // Strictly increasing in evaluations_used; the last one is the final state.
    std::vector<Checkpoint> checkpoints;
    // Same schedule, measured without noise (metrics.exact).
    std::vector<Checkpoint> exact_checkpoints;
    // Final measurement with the best-of-cell selector (metrics.best_of_cell).
    std::optional<Checkpoint> best_of_cell;
    std::uint64_t evaluations_used = 0;
    std::uint64_t generations = 0;
    std::uint64_t drifts = 0;
    // Empty when the run was not written to disk.
    std::filesystem::path snapshot;
};

// Fixed metrics CSV layout.
inline constexpr const char* metrics_csv_header =
    "task,variant,replication,evaluations,correct_bd,corrected_collection_size,total_corrected_quality,"
    "wallclock_seconds,metric_evaluations";

std::string metrics_csv_row(const ExperimentConfig& config, std::size_t replication, const Checkpoint& checkpoint);

Problem make_problem(const ExperimentConfig& config);

// Rng streams of one replication.
Rng replication_stream(const ExperimentConfig& config, std::size_t replication, std::string_view label);

/// Measures the grid with the variant's in-cell selector (or `selector`
/// when given). Never touches the run's budget.
MetricsRecord measure(const Grid& grid, const Problem& problem, const ExperimentConfig& config,
                      const NoiseSpec& noise, const SelectorSpec& selector, Rng& rng);

/// Runs one replication to the budget. When config.output_dir is non-empty
/// its files go under <output_dir>/replications/rep_NNNN/.
RunResult run_replication(const ExperimentConfig& config, std::size_t replication);

/// Runs every replication on config.workers threads and, when
/// config.output_dir is non-empty, writes the merged CSVs and the resolved
/// config. Throws ConfigError for an invalid config and std::runtime_error
/// for I/O failures.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

}  // namespace deepgrid
