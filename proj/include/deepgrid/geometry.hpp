#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "deepgrid/types.hpp"

namespace deepgrid {

// Axis-aligned grid over a box. Cells are numbered row-major, first
// dimension slowest. Coordinates outside the box clamp to the boundary bin.
class CartesianGeometry {
public:
    CartesianGeometry(std::vector<Interval> bounds, std::vector<std::size_t> bins);

    std::size_t dimension() const { return bounds_.size(); }
    std::size_t cell_count() const { return cell_count_; }
    const std::vector<Interval>& bounds() const { return bounds_; }
    const std::vector<std::size_t>& bins() const { return bins_; }

    CellIndex locate(std::span<const double> bd) const;
    Descriptor cell_center(CellIndex cell) const;

private:
    std::vector<Interval> bounds_;
    std::vector<std::size_t> bins_;
    std::size_t cell_count_ = 1;
};

// Disc of radius max_radius split into equal-width rings, each ring split
// into equal angular sectors. Rings are numbered from the centre outwards,
// sectors counterclockwise from angle 0. Radii beyond max_radius clamp to
// the outer ring.
class PolarGeometry {
public:
    PolarGeometry(double max_radius, std::vector<std::size_t> sectors_per_ring);

    // Ring i gets 2 * (2i + 1) sectors, which makes every cell the same area.
    static PolarGeometry equal_area(double max_radius, std::size_t ring_count);

    std::size_t dimension() const { return 2; }
    std::size_t cell_count() const { return ring_offset_.back(); }
    double max_radius() const { return max_radius_; }
    std::size_t ring_count() const { return sectors_.size(); }
    const std::vector<std::size_t>& sectors_per_ring() const { return sectors_; }

    CellIndex locate(std::span<const double> bd) const;
    Descriptor cell_center(CellIndex cell) const;

private:
    double max_radius_;
    std::vector<std::size_t> sectors_;
    // ring_offset_[i] = index of the first cell of ring i; back() = total.
    std::vector<std::size_t> ring_offset_;
};

// Type-erased BD-space discretizer. Immutable after construction.
class Geometry {
public:
    Geometry(CartesianGeometry g) : impl_(std::move(g)) {}
    Geometry(PolarGeometry g) : impl_(std::move(g)) {}

    std::size_t dimension() const;
    std::size_t cell_count() const;
    CellIndex locate(std::span<const double> bd) const;
    Descriptor cell_center(CellIndex cell) const;

    const std::variant<CartesianGeometry, PolarGeometry>& impl() const { return impl_; }

private:
    std::variant<CartesianGeometry, PolarGeometry> impl_;
};

}  // namespace deepgrid
