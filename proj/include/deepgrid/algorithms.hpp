#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "deepgrid/geometry.hpp"
#include "deepgrid/grid.hpp"
#include "deepgrid/selection.hpp"
#include "deepgrid/tasks.hpp"

namespace deepgrid {

enum class Variant {
    naive,           // explicit averaging over a fixed number of samples
    adaptive,        // adaptive sampling, elites pinned to their first cell
    adaptive_drift,  // adaptive sampling with drifting elites and ranked depth
    deep_grid,
};

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

struct AlgorithmSpec {
    Variant variant = Variant::deep_grid;
    std::size_t samples = 1;  // naive only
    std::size_t depth = 50;   // deep_grid and adaptive_drift
    std::size_t batch_size = 100;
    std::size_t init_size = 100;
    MutationSpec mutation{0.05, 0.1};
    double epsilon_fraction = 0.1;
    // Noise-free baseline: charged evaluations ignore the task noise.
    bool noise_free = false;

    static AlgorithmSpec deep_grid(std::size_t depth = 50);
    static AlgorithmSpec naive(std::size_t samples);
    static AlgorithmSpec adaptive();
    static AlgorithmSpec adaptive_drift(std::size_t depth = 10);
    static AlgorithmSpec baseline();

    // e.g. "deep_grid_50", "naive_1", "adaptive", "adaptive_drift_10".
    std::string label() const;
    std::size_t grid_depth() const;
    // In-cell rule used both for parent selection and for metric sampling.
    SelectorSpec in_cell_selector() const;
    // Evaluations charged by initialization.
    std::uint64_t init_cost() const;

    void validate() const;
};

// Everything a run needs to know about the task.
struct Problem {
    TaskSpec task;
    DeterministicEvaluator evaluate;
    NoiseSpec noise;
    Geometry geometry;
};

Problem make_problem(TaskSpec task, NoiseSpec noise, Geometry geometry);

struct RunState {
    RunState(Grid g, Rng variation, Rng noise, Rng selection)
        : grid(std::move(g)), variation_rng(variation), noise_rng(noise), selection_rng(selection) {}

    Grid grid;
    std::uint64_t evaluations_used = 0;
    std::uint64_t generation = 0;
    std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t drifts = 0;

    Rng variation_rng;
    Rng noise_rng;
    Rng selection_rng;

    // Genotypes stored into the grid, in order, when recording is enabled.
    bool record_accepted = false;
    std::vector<Genotype> accepted;

    std::uint64_t remaining() const { return budget - evaluations_used; }
};

// One charged evaluation, or nothing if the budget is exhausted.
using SampleFn = std::function<std::optional<Evaluation>(const Genotype&)>;

enum class ChallengeOutcome { replace, reject };

/// The challenger is re-sampled one evaluation at a time while its mean is
/// at least the elite's and it has fewer samples. It replaces the elite only
/// if it is strictly better at matched sample counts. When it falls below the
/// elite, the elite is re-sampled once. An exhausted budget rejects.
ChallengeOutcome adaptive_challenge(Individual& elite, Individual& challenger, const SampleFn& sample);

/// Builds the run state and fills the grid with `spec.init_size` uniform
/// random genotypes. Throws std::invalid_argument on a zero init size or
/// when the budget cannot pay for initialization.
RunState initialize_grid(const Problem& problem, const AlgorithmSpec& spec, Rng variation, Rng noise,
                         Rng selection, std::uint64_t budget = std::numeric_limits<std::uint64_t>::max());

/// Adaptive rule for one evaluated offspring: fill an empty cell or
/// challenge its elite. Elites stay in the cell they were first placed in.
void adaptive_insert(RunState& state, const Problem& problem, const AlgorithmSpec& spec, Individual offspring);

/// Drifting rule for one evaluated offspring on a ranked grid. After any
/// re-sampling, occupants whose mean descriptor now locates elsewhere are
/// moved there (challenging that cell's elite), to a fixed point.
void adaptive_drift_insert(RunState& state, const Problem& problem, const AlgorithmSpec& spec, Individual offspring);

void deep_grid_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec);
void naive_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec);
void adaptive_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec);
void adaptive_drift_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec);

/// Runs one generation of the variant if the budget allows it. Fixed-cost
/// variants need the whole batch to fit; adaptive variants need room for at
/// least one evaluation and stop mid-batch when the budget runs out.
bool run_generation(RunState& state, const Problem& problem, const AlgorithmSpec& spec);

}  // namespace deepgrid
