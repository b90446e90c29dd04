#include "deepgrid/selection.hpp"

namespace deepgrid {

std::string_view to_string(InCellRule rule)
{
    switch (rule) {
    case InCellRule::single_occupant:
        return "single_occupant";
    case InCellRule::best_of_cell:
        return "best_of_cell";
    case InCellRule::fitness_proportional:
        return "fitness_proportional";
    }
    return "unknown";
}

CellIndex select_cell(const Grid& grid, Rng& rng)
{
    const auto occupied = grid.occupied_cells();
    if (occupied.empty()) {
        throw std::logic_error("select_cell on an empty grid");
    }
    std::uniform_int_distribution<std::size_t> pick(0, occupied.size() - 1);
    return occupied[pick(rng)];
}

std::vector<double> proportional_weights(std::span<const Individual> occupants, double epsilon_fraction)
{
    auto [lo, hi] = std::minmax_element(occupants.begin(), occupants.end(),
                                        [](const auto& a, const auto& b) { return a.fitness() < b.fitness(); });
    const double f_min = lo->fitness();
    const double range = hi->fitness() - f_min;
    std::vector<double> weights(occupants.size(), 1.0);
    if (range > 0.0) {
        const double eps = epsilon_fraction * range;
        for (std::size_t i = 0; i < occupants.size(); ++i) {
            weights[i] = occupants[i].fitness() - f_min + eps;
        }
    }
    return weights;
}

std::size_t select_in_cell_slot(const DeepCell& cell, const SelectorSpec& spec, Rng& rng)
{
    if (cell.empty()) {
        throw std::logic_error("in-cell selection on an empty cell");
    }
    switch (spec.rule) {
    case InCellRule::single_occupant:
        if (cell.size() != 1) {
            throw std::logic_error("single-occupant selection on a cell with several occupants");
        }
        return 0;
    case InCellRule::best_of_cell: {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cell.size(); ++i) {
            if (cell[i].fitness() > cell[best].fitness()) {
                best = i;
            }
        }
        return best;
    }
    case InCellRule::fitness_proportional:
        break;
    }

    if (cell.size() == 1) {
        return 0;
    }
    const auto weights = proportional_weights(cell.occupants(), spec.epsilon_fraction);
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) {
            return i;
        }
        u -= weights[i];
    }
    return weights.size() - 1;
}

}  // namespace deepgrid
