#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "deepgrid/types.hpp"

namespace deepgrid {

// A bounded, unordered slab of individuals sharing one BD-space cell.
class DeepCell {
public:
    explicit DeepCell(std::size_t capacity) : capacity_(capacity) {}

    std::size_t size() const { return occupants_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return occupants_.empty(); }
    bool full() const { return occupants_.size() >= capacity_; }

    const Individual& operator[](std::size_t slot) const { return occupants_[slot]; }
    std::span<const Individual> occupants() const { return occupants_; }

private:
    friend class Grid;

    std::vector<Individual> occupants_;
    std::size_t capacity_;
};

// Cells of a discretized BD space, each holding up to `depth` individuals.
//
// The grid only knows cell identities; mapping descriptors to cells is the
// job of a Geometry. Single-writer.
class Grid {
public:
    Grid(std::size_t cell_count, std::size_t depth);

    std::size_t cell_count() const { return cells_.size(); }
    std::size_t depth() const { return depth_; }

    // Number of cells holding at least one individual.
    std::size_t coverage() const { return occupied_.size(); }
    std::size_t total_individuals() const;

    const DeepCell& cell(CellIndex index) const;

    // Non-empty cells. Order is deterministic given the history of
    // mutations but otherwise meaningless.
    std::span<const CellIndex> occupied_cells() const { return occupied_; }

    // Mutable access to one occupant; occupancy is unchanged.
    Individual& occupant(CellIndex index, std::size_t slot);

    void append(CellIndex index, Individual indiv);
    // Inserts at `slot`, shifting later occupants back. Cell must not be full.
    void insert_at(CellIndex index, std::size_t slot, Individual indiv);
    // Order-preserving removal.
    Individual remove(CellIndex index, std::size_t slot);
    Individual replace(CellIndex index, std::size_t slot, Individual indiv);

    // Stable sort of one cell by descending stored fitness.
    void rank_by_fitness(CellIndex index);

    bool operator==(const Grid& other) const;

private:
    DeepCell& mutable_cell(CellIndex index);
    void mark_occupied(CellIndex index);
    void mark_vacated(CellIndex index);

    std::vector<DeepCell> cells_;
    std::size_t depth_;
    std::vector<CellIndex> occupied_;
    // Position of each cell inside occupied_, or npos.
    std::vector<std::size_t> occupied_pos_;
};

/// Deep-Grid insertion: append below capacity, otherwise evict a uniformly
/// chosen occupant and put `indiv` in its slot. Returns the evictee.
std::optional<Individual> insert_replace_random(Grid& grid, CellIndex cell, Individual indiv, Rng& rng);

/// MAP-Elites insertion on a depth-1 grid. Ties keep the incumbent.
/// Throws std::logic_error when the grid depth is not 1.
bool insert_elitist(Grid& grid, CellIndex cell, Individual indiv);

inline std::size_t coverage(const Grid& grid) { return grid.coverage(); }

}  // namespace deepgrid
