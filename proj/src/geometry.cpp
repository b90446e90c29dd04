#include "deepgrid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace deepgrid {

namespace {

std::size_t bin_of(double value, double lower, double width, std::size_t bins)
{
    const double scaled = (value - lower) / width * static_cast<double>(bins);
    if (!(scaled > 0.0)) {  // also catches NaN
        return 0;
    }
    const auto bin = static_cast<std::size_t>(std::floor(scaled));
    return std::min(bin, bins - 1);
}

}  // namespace

CartesianGeometry::CartesianGeometry(std::vector<Interval> bounds, std::vector<std::size_t> bins)
    : bounds_(std::move(bounds)), bins_(std::move(bins))
{
    if (bounds_.empty() || bounds_.size() != bins_.size()) {
        throw std::invalid_argument("cartesian geometry: bounds and bins must have the same non-zero length");
    }
    for (std::size_t d = 0; d < bins_.size(); ++d) {
        if (bins_[d] == 0) {
            throw std::invalid_argument("cartesian geometry: bin counts must be >= 1");
        }
        if (!(bounds_[d].lower < bounds_[d].upper)) {
            throw std::invalid_argument("cartesian geometry: lower bound must be below upper bound");
        }
        cell_count_ *= bins_[d];
    }
}

CellIndex CartesianGeometry::locate(std::span<const double> bd) const
{
    if (bd.size() != bounds_.size()) {
        throw std::invalid_argument("cartesian geometry: descriptor dimension mismatch");
    }
    std::size_t index = 0;
    for (std::size_t d = 0; d < bd.size(); ++d) {
        index = index * bins_[d] + bin_of(bd[d], bounds_[d].lower, bounds_[d].width(), bins_[d]);
    }
    return CellIndex{index};
}

Descriptor CartesianGeometry::cell_center(CellIndex cell) const
{
    if (cell.value >= cell_count_) {
        throw std::out_of_range("cartesian geometry: cell index out of range");
    }
    Descriptor center(bounds_.size());
    auto rest = cell.value;
    for (std::size_t d = bounds_.size(); d-- > 0;) {
        const auto bin = rest % bins_[d];
        rest /= bins_[d];
        const double step = bounds_[d].width() / static_cast<double>(bins_[d]);
        center[d] = bounds_[d].lower + (static_cast<double>(bin) + 0.5) * step;
    }
    return center;
}

PolarGeometry::PolarGeometry(double max_radius, std::vector<std::size_t> sectors_per_ring)
    : max_radius_(max_radius), sectors_(std::move(sectors_per_ring))
{
    if (!(max_radius_ > 0.0)) {
        throw std::invalid_argument("polar geometry: max_radius must be positive");
    }
    if (sectors_.empty()) {
        throw std::invalid_argument("polar geometry: needs at least one ring");
    }
    ring_offset_.reserve(sectors_.size() + 1);
    ring_offset_.push_back(0);
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
        if (sectors_[i] == 0) {
            throw std::invalid_argument("polar geometry: every ring needs at least one sector");
        }
        if (i > 0 && sectors_[i] < sectors_[i - 1]) {
            throw std::invalid_argument("polar geometry: sector counts must be non-decreasing outward");
        }
        ring_offset_.push_back(ring_offset_.back() + sectors_[i]);
    }
}

PolarGeometry PolarGeometry::equal_area(double max_radius, std::size_t ring_count)
{
    std::vector<std::size_t> sectors(ring_count);
    for (std::size_t i = 0; i < ring_count; ++i) {
        sectors[i] = 2 * (2 * i + 1);
    }
    return PolarGeometry(max_radius, std::move(sectors));
}

CellIndex PolarGeometry::locate(std::span<const double> bd) const
{
    if (bd.size() != 2) {
        throw std::invalid_argument("polar geometry: descriptor must be 2-D");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const std::size_t rings = sectors_.size();
    const auto ring = bin_of(std::hypot(bd[0], bd[1]), 0.0, max_radius_, rings);

    double angle = std::atan2(bd[1], bd[0]);
    if (angle < 0.0) {
        angle += two_pi;
    }
    const auto sector = bin_of(angle, 0.0, two_pi, sectors_[ring]);
    return CellIndex{ring_offset_[ring] + sector};
}

Descriptor PolarGeometry::cell_center(CellIndex cell) const
{
    if (cell.value >= cell_count()) {
        throw std::out_of_range("polar geometry: cell index out of range");
    }
    const auto it = std::upper_bound(ring_offset_.begin(), ring_offset_.end(), cell.value);
    const auto ring = static_cast<std::size_t>(it - ring_offset_.begin()) - 1;
    const auto sector = cell.value - ring_offset_[ring];

    const double ring_width = max_radius_ / static_cast<double>(sectors_.size());
    const double radius = (static_cast<double>(ring) + 0.5) * ring_width;
    const double sector_width = 2.0 * std::numbers::pi / static_cast<double>(sectors_[ring]);
    const double angle = (static_cast<double>(sector) + 0.5) * sector_width;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::size_t Geometry::dimension() const
{
    return std::visit([](const auto& g) { return g.dimension(); }, impl_);
}

std::size_t Geometry::cell_count() const
{
    return std::visit([](const auto& g) { return g.cell_count(); }, impl_);
}

CellIndex Geometry::locate(std::span<const double> bd) const
{
    return std::visit([bd](const auto& g) { return g.locate(bd); }, impl_);
}

Descriptor Geometry::cell_center(CellIndex cell) const
{
    return std::visit([cell](const auto& g) { return g.cell_center(cell); }, impl_);
}

}  // namespace deepgrid
