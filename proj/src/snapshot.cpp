#include "deepgrid/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace deepgrid {

std::string format_number(double value)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format number");
    }
    return std::string(buf, end);
}

double parse_number(std::string_view text)
{
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw std::runtime_error("malformed number '" + std::string(text) + "'");
    }
    return value;
}

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::size_t parse_count(std::string_view text)
{
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw std::runtime_error("malformed integer '" + std::string(text) + "'");
    }
    return value;
}

std::string header(std::size_t genotype_dim, std::size_t bd_dim)
{
    std::string h = "cell_index,slot";
    for (std::size_t i = 0; i < genotype_dim; ++i) {
        h += ",g" + std::to_string(i);
    }
    h += ",fitness";
    for (std::size_t i = 0; i < bd_dim; ++i) {
        h += ",bd" + std::to_string(i);
    }
    h += ",sample_count";
    return h;
}

}  // namespace

void write_snapshot(const Grid& grid, std::size_t genotype_dim, std::size_t bd_dim, std::ostream& out)
{
    out << header(genotype_dim, bd_dim) << '\n';
    std::vector<CellIndex> cells(grid.occupied_cells().begin(), grid.occupied_cells().end());
    std::sort(cells.begin(), cells.end());
    for (auto cell : cells) {
        const auto& c = grid.cell(cell);
        for (std::size_t slot = 0; slot < c.size(); ++slot) {
            const auto& ind = c[slot];
            if (ind.genotype.size() != genotype_dim || ind.descriptor().size() != bd_dim) {
                throw std::runtime_error("snapshot: occupant shape does not match the header");
            }
            out << cell.value << ',' << slot;
            for (double g : ind.genotype) {
                out << ',' << format_number(g);
            }
            out << ',' << format_number(ind.fitness());
            for (double b : ind.descriptor()) {
                out << ',' << format_number(b);
            }
            out << ',' << ind.sample_count << '\n';
        }
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

void export_grid_snapshot(const Grid& grid, std::size_t genotype_dim, std::size_t bd_dim,
                          const std::filesystem::path& path)
{
    std::ostringstream out;
    write_snapshot(grid, genotype_dim, bd_dim, out);
    write_file_atomic(path, out.str());
}

Grid read_snapshot(std::istream& in, std::size_t cell_count, std::size_t depth)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("snapshot: missing header");
    }
    const auto columns = split(line);
    std::size_t genotype_dim = 0;
    while (2 + genotype_dim < columns.size() && columns[2 + genotype_dim] != "fitness") {
        ++genotype_dim;
    }
    if (columns.size() < 4 || 2 + genotype_dim >= columns.size()) {
        throw std::runtime_error("snapshot: malformed header");
    }
    const std::size_t bd_dim = columns.size() - genotype_dim - 4;
    if (line != header(genotype_dim, bd_dim)) {
        throw std::runtime_error("snapshot: unexpected header '" + line + "'");
    }

    Grid grid(cell_count, depth);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != columns.size()) {
            throw std::runtime_error("snapshot: row " + std::to_string(row) + " has the wrong number of fields");
        }
        const CellIndex cell{parse_count(fields[0])};
        const auto slot = parse_count(fields[1]);
        if (cell.value >= cell_count) {
            throw std::runtime_error("snapshot: row " + std::to_string(row) + " cell index out of range");
        }
        if (slot != grid.cell(cell).size()) {
            throw std::runtime_error("snapshot: row " + std::to_string(row) + " slots out of order");
        }
        Individual ind;
        for (std::size_t i = 0; i < genotype_dim; ++i) {
            ind.genotype.push_back(parse_number(fields[2 + i]));
        }
        ind.evaluation.fitness = parse_number(fields[2 + genotype_dim]);
        for (std::size_t i = 0; i < bd_dim; ++i) {
            ind.evaluation.descriptor.push_back(parse_number(fields[3 + genotype_dim + i]));
        }
        ind.sample_count = static_cast<std::uint32_t>(parse_count(fields.back()));
        if (ind.sample_count == 0) {
            throw std::runtime_error("snapshot: row " + std::to_string(row) + " has sample_count 0");
        }
        if (grid.cell(cell).full()) {
            throw std::runtime_error("snapshot: cell " + std::to_string(cell.value) + " exceeds the grid depth");
        }
        grid.append(cell, std::move(ind));
    }
    return grid;
}

Grid load_grid_snapshot(const std::filesystem::path& path, std::size_t cell_count, std::size_t depth)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open snapshot " + path.string());
    }
    return read_snapshot(in, cell_count, depth);
}

}  // namespace deepgrid
