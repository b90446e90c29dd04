#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepgrid/algorithms.hpp"
#include "deepgrid/geometry.hpp"
#include "deepgrid/metrics.hpp"
#include "deepgrid/tasks.hpp"

namespace deepgrid {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeometryConfig {
    enum class Kind { cartesian, polar };
    Kind kind = Kind::cartesian;

    // cartesian
    std::vector<Interval> bounds;
    std::vector<std::size_t> bins;

    // polar; an empty sectors_per_ring means the equal-area layout
    double max_radius = 1.0;
    std::size_t rings = 71;
    std::vector<std::size_t> sectors_per_ring;

    Geometry build() const;
};

// 100x100 Cartesian grid over the descriptor bounds for Rastrigin, the
// 71-ring equal-area polar grid for the arm.
GeometryConfig default_geometry(const TaskSpec& task);

struct MetricsConfig {
    std::size_t n_repeat = 50;
    // Also record metrics measured with a noise-free evaluator.
    bool exact = false;
    // Also record a final best-of-cell measurement.
    bool best_of_cell = false;
    CorrectnessCount correctness = CorrectnessCount::before_collisions;
};

struct ExperimentConfig {
    TaskSpec task = rastrigin_spec();
    NoiseSpec noise;
    GeometryConfig grid = default_geometry(rastrigin_spec());
    AlgorithmSpec algorithm = AlgorithmSpec::deep_grid(50);
    std::uint64_t budget = 500000;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    // 0 means 5% of the budget.
    std::uint64_t checkpoint_interval = 0;
    MetricsConfig metrics;
    std::size_t workers = 1;
    std::filesystem::path output_dir = "results";
    // Wallclock column is written as 0 unless enabled, so outputs stay
    // byte-reproducible by default.
    bool record_wallclock = false;

    std::uint64_t effective_checkpoint_interval() const;
    /// Throws ConfigError with a descriptive message.
    void validate() const;
};

/// Parses one experiment. Unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& root);

/// Expands the "sweep" section (variants x tasks) into one config per
/// combination, each writing to <output_dir>/<task>/<variant label>. A config
/// without a sweep section yields itself.
std::vector<ExperimentConfig> expand_sweep(const nlohmann::json& root);

nlohmann::json read_json_file(const std::filesystem::path& path);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace deepgrid
