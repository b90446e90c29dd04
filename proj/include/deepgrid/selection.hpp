#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "deepgrid/grid.hpp"
#include "deepgrid/types.hpp"

namespace deepgrid {

enum class InCellRule { single_occupant, best_of_cell, fitness_proportional };

std::string_view to_string(InCellRule rule);

struct SelectorSpec {
    InCellRule rule = InCellRule::fitness_proportional;
    // Floor added to every shifted weight, as a fraction of the in-cell
    // fitness range.
    double epsilon_fraction = 0.1;
};

struct MutationSpec {
    double per_gene_rate = 0.1;
    // Gaussian step standard deviation as a fraction of the gene range.
    double sigma_fraction = 0.1;
};

/// Uniform over the non-empty cells of the grid.
CellIndex select_cell(const Grid& grid, Rng& rng);

/// Selection weights w_i = f_i - f_min + eps with eps = epsilon_fraction *
/// (f_max - f_min). Returns all ones when every fitness is equal.
std::vector<double> proportional_weights(std::span<const Individual> occupants, double epsilon_fraction);

/// Slot of the occupant picked by `spec`. The cell must not be empty.
std::size_t select_in_cell_slot(const DeepCell& cell, const SelectorSpec& spec, Rng& rng);

inline const Individual& select_in_cell(const DeepCell& cell, const SelectorSpec& spec, Rng& rng)
{
    return cell[select_in_cell_slot(cell, spec, rng)];
}

/// Each gene independently, with probability per_gene_rate, gets a
/// N(0, sigma_fraction * range) step and is clamped to its bounds.
template <std::uniform_random_bit_generator G>
Genotype mutate(std::span<const double> parent, const MutationSpec& spec, std::span<const Interval> bounds, G& rng)
{
    if (parent.size() != bounds.size()) {
        throw std::invalid_argument("mutate: genotype and bounds differ in length");
    }
    Genotype child(parent.begin(), parent.end());
    std::bernoulli_distribution fires(spec.per_gene_rate);
    for (std::size_t i = 0; i < child.size(); ++i) {
        if (!fires(rng)) {
            continue;
        }
        const auto& b = bounds[i];
        std::normal_distribution<double> step(0.0, spec.sigma_fraction * b.width());
        child[i] = std::clamp(child[i] + step(rng), b.lower, b.upper);
    }
    return child;
}

}  // namespace deepgrid
