#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "deepgrid/geometry.hpp"
#include "deepgrid/grid.hpp"
#include "deepgrid/selection.hpp"
#include "deepgrid/tasks.hpp"

namespace deepgrid {

// Ground-truth estimate of one source cell: means over repeated
// select-then-evaluate draws.
struct CellEntity {
    CellIndex source_cell;
    double corrected_fitness = 0.0;
    Descriptor corrected_bd;
};

struct CorrectedContainer {
    // One entity per non-empty source cell, in increasing source-cell order.
    std::vector<CellEntity> entities;
    // targets[i] is the cell entities[i].corrected_bd locates to.
    std::vector<CellIndex> targets;
    // Corrected cell -> index of the entity kept there.
    std::map<CellIndex, std::size_t> cells;
};

struct MetricsRecord {
    std::uint64_t evaluations_used = 0;
    std::size_t correct_bd_count = 0;
    std::size_t corrected_collection_size = 0;
    double total_corrected_quality = 0.0;
    // Evaluations spent on measuring; never charged to the run.
    std::uint64_t metric_evaluations = 0;

    bool operator==(const MetricsRecord&) const = default;
};

enum class CorrectnessCount {
    // An entity counts when its target is its own source cell.
    before_collisions,
    // Only entities that also survive collision resolution count.
    after_collisions,
};

/// Draws an occupant with `selector` and evaluates it, n_repeat times, and
/// returns the means. Throws std::logic_error on an empty cell or n_repeat 0.
CellEntity sample_cell_entity(const Grid& grid, CellIndex cell, const SelectorSpec& selector,
                              const NoisyEvaluator& evaluator, std::size_t n_repeat, Rng& rng);

/// Samples every non-empty cell and relocates each entity to the cell of its
/// corrected descriptor. Collisions keep the higher corrected fitness; on a
/// tie the entity from the lower source cell stays.
CorrectedContainer build_corrected_container(const Grid& grid, const Geometry& geometry,
                                             const SelectorSpec& selector, const NoisyEvaluator& evaluator,
                                             std::size_t n_repeat, Rng& rng);

/// Relocation and collision resolution for already-sampled entities.
CorrectedContainer relocate_entities(std::vector<CellEntity> entities, const Geometry& geometry);

MetricsRecord compute_metrics(const CorrectedContainer& corrected, const TaskSpec& task,
                              CorrectnessCount mode = CorrectnessCount::before_collisions);

/// Fitness normalised into [0, 1] with the task's fitness bounds.
double normalized_quality(double fitness, const TaskSpec& task);

}  // namespace deepgrid
