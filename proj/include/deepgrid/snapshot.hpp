#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "deepgrid/grid.hpp"

namespace deepgrid {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text);

/// One row per occupant, in increasing cell order then slot order:
/// cell_index,slot,g0..g{d-1},fitness,bd0..bd{k-1},sample_count
void write_snapshot(const Grid& grid, std::size_t genotype_dim, std::size_t bd_dim, std::ostream& out);

/// Writes through a temporary file renamed into place. Throws
/// std::runtime_error on I/O failure.
void export_grid_snapshot(const Grid& grid, std::size_t genotype_dim, std::size_t bd_dim,
                          const std::filesystem::path& path);

/// Rebuilds a grid of the given shape from a snapshot. Genotype and
/// descriptor widths come from the header. Throws std::runtime_error on
/// malformed input.
Grid load_grid_snapshot(const std::filesystem::path& path, std::size_t cell_count, std::size_t depth);
Grid read_snapshot(std::istream& in, std::size_t cell_count, std::size_t depth);

// Writes `content` to `path` via a sibling temporary and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace deepgrid
