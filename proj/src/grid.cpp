#include "deepgrid/grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace deepgrid {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

Grid::Grid(std::size_t cell_count, std::size_t depth)
    : depth_(depth), occupied_pos_(cell_count, npos)
{
    if (cell_count == 0) {
        throw std::invalid_argument("grid needs at least one cell");
    }
    if (depth == 0) {
        throw std::invalid_argument("grid depth must be at least 1");
    }
    cells_.assign(cell_count, DeepCell(depth));
}

std::size_t Grid::total_individuals() const
{
    std::size_t total = 0;
    for (auto c : occupied_) {
        total += cells_[c.value].size();
    }
    return total;
}

const DeepCell& Grid::cell(CellIndex index) const
{
    if (index.value >= cells_.size()) {
        throw std::out_of_range("cell index " + std::to_string(index.value) + " out of range");
    }
    return cells_[index.value];
}

DeepCell& Grid::mutable_cell(CellIndex index)
{
    if (index.value >= cells_.size()) {
        throw std::out_of_range("cell index " + std::to_string(index.value) + " out of range");
    }
    return cells_[index.value];
}

Individual& Grid::occupant(CellIndex index, std::size_t slot)
{
    return mutable_cell(index).occupants_.at(slot);
}

void Grid::mark_occupied(CellIndex index)
{
    if (occupied_pos_[index.value] == npos) {
        occupied_pos_[index.value] = occupied_.size();
        occupied_.push_back(index);
    }
}

void Grid::mark_vacated(CellIndex index)
{
    auto pos = occupied_pos_[index.value];
    if (pos == npos) {
        return;
    }
    auto last = occupied_.back();
    occupied_[pos] = last;
    occupied_pos_[last.value] = pos;
    occupied_.pop_back();
    occupied_pos_[index.value] = npos;
}

void Grid::append(CellIndex index, Individual indiv)
{
    auto& c = mutable_cell(index);
    if (c.full()) {
        throw std::logic_error("append into a full cell");
    }
    c.occupants_.push_back(std::move(indiv));
    mark_occupied(index);
}

void Grid::insert_at(CellIndex index, std::size_t slot, Individual indiv)
{
    auto& c = mutable_cell(index);
    if (c.full()) {
        throw std::logic_error("insert into a full cell");
    }
    if (slot > c.size()) {
        throw std::out_of_range("slot past end of cell");
    }
    c.occupants_.insert(c.occupants_.begin() + static_cast<std::ptrdiff_t>(slot), std::move(indiv));
    mark_occupied(index);
}

Individual Grid::remove(CellIndex index, std::size_t slot)
{
    auto& c = mutable_cell(index);
    if (slot >= c.size()) {
        throw std::out_of_range("slot past end of cell");
    }
    auto it = c.occupants_.begin() + static_cast<std::ptrdiff_t>(slot);
    Individual out = std::move(*it);
    c.occupants_.erase(it);
    if (c.empty()) {
        mark_vacated(index);
    }
    return out;
}

Individual Grid::replace(CellIndex index, std::size_t slot, Individual indiv)
{
    auto& c = mutable_cell(index);
    if (slot >= c.size()) {
        throw std::out_of_range("slot past end of cell");
    }
    std::swap(c.occupants_[slot], indiv);
    return indiv;
}

void Grid::rank_by_fitness(CellIndex index)
{
    auto& occ = mutable_cell(index).occupants_;
    std::stable_sort(occ.begin(), occ.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness() > b.fitness(); });
}

bool Grid::operator==(const Grid& other) const
{
    if (depth_ != other.depth_ || cells_.size() != other.cells_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].occupants_ != other.cells_[i].occupants_) {
            return false;
        }
    }
    return true;
}

std::optional<Individual> insert_replace_random(Grid& grid, CellIndex cell, Individual indiv, Rng& rng)
{
    const auto& c = grid.cell(cell);
    if (!c.full()) {
        grid.append(cell, std::move(indiv));
        return std::nullopt;
    }
    std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
    return grid.replace(cell, pick(rng), std::move(indiv));
}

bool insert_elitist(Grid& grid, CellIndex cell, Individual indiv)
{
    if (grid.depth() != 1) {
        throw std::logic_error("elitist insertion requires a depth-1 grid");
    }
    const auto& c = grid.cell(cell);
    if (c.empty()) {
        grid.append(cell, std::move(indiv));
        return true;
    }
    if (indiv.fitness() > c[0].fitness()) {
        grid.replace(cell, 0, std::move(indiv));
        return true;
    }
    return false;
}

}  // namespace deepgrid
