#include "deepgrid/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace deepgrid {

CellEntity sample_cell_entity(const Grid& grid, CellIndex cell, const SelectorSpec& selector,
                              const NoisyEvaluator& evaluator, std::size_t n_repeat, Rng& rng)
{
    if (n_repeat == 0) {
        throw std::logic_error("n_repeat must be >= 1");
    }
    const auto& c = grid.cell(cell);
    if (c.empty()) {
        throw std::logic_error("cannot sample an empty cell");
    }

    CellEntity entity;
    entity.source_cell = cell;
    double fitness_sum = 0.0;
    for (std::size_t k = 0; k < n_repeat; ++k) {
        const auto& occupant = select_in_cell(c, selector, rng);
        const auto e = evaluator(occupant.genotype, rng);
        fitness_sum += e.fitness;
        if (entity.corrected_bd.empty()) {
            entity.corrected_bd.assign(e.descriptor.size(), 0.0);
        }
        for (std::size_t d = 0; d < e.descriptor.size(); ++d) {
            entity.corrected_bd[d] += e.descriptor[d];
        }
    }
    const double n = static_cast<double>(n_repeat);
    entity.corrected_fitness = fitness_sum / n;
    for (auto& v : entity.corrected_bd) {
        v /= n;
    }
    return entity;
}

CorrectedContainer relocate_entities(std::vector<CellEntity> entities, const Geometry& geometry)
{
    std::sort(entities.begin(), entities.end(),
              [](const CellEntity& a, const CellEntity& b) { return a.source_cell < b.source_cell; });

    CorrectedContainer out;
    out.targets.reserve(entities.size());
    for (std::size_t i = 0; i < entities.size(); ++i) {
        const auto target = geometry.locate(entities[i].corrected_bd);
        out.targets.push_back(target);
        auto [it, inserted] = out.cells.try_emplace(target, i);
        if (!inserted && entities[i].corrected_fitness > entities[it->second].corrected_fitness) {
            it->second = i;
        }
    }
    out.entities = std::move(entities);
    return out;
}

CorrectedContainer build_corrected_container(const Grid& grid, const Geometry& geometry,
                                             const SelectorSpec& selector, const NoisyEvaluator& evaluator,
                                             std::size_t n_repeat, Rng& rng)
{
    std::vector<CellIndex> sources(grid.occupied_cells().begin(), grid.occupied_cells().end());
    std::sort(sources.begin(), sources.end());

    std::vector<CellEntity> entities;
    entities.reserve(sources.size());
    for (auto cell : sources) {
        entities.push_back(sample_cell_entity(grid, cell, selector, evaluator, n_repeat, rng));
    }
    return relocate_entities(std::move(entities), geometry);
}

double normalized_quality(double fitness, const TaskSpec& task)
{
    const auto& b = task.fitness_bounds;
    return std::clamp((fitness - b.lower) / b.width(), 0.0, 1.0);
}

MetricsRecord compute_metrics(const CorrectedContainer& corrected, const TaskSpec& task, CorrectnessCount mode)
{
    MetricsRecord record;
    record.corrected_collection_size = corrected.cells.size();
    for (const auto& [cell, index] : corrected.cells) {
        record.total_corrected_quality += normalized_quality(corrected.entities[index].corrected_fitness, task);
    }

    if (mode == CorrectnessCount::before_collisions) {
        for (std::size_t i = 0; i < corrected.entities.size(); ++i) {
            if (corrected.targets[i] == corrected.entities[i].source_cell) {
                ++record.correct_bd_count;
            }
        }
    } else {
        for (const auto& [cell, index] : corrected.cells) {
            if (corrected.entities[index].source_cell == cell) {
                ++record.correct_bd_count;
            }
        }
    }
    return record;
}

}  // namespace deepgrid
