#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vinesar::csv {

/// Minimal comma-separated table: a header row and string cells.
/// Fields never contain commas or quotes in any of the formats this project emits.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Table& table);
std::string to_string(const Table& table);

std::vector<std::string> split_line(std::string_view line);

/// Shortest round-trip decimal representation ("nan" for NaN).
std::string format_number(double value);
double parse_number(std::string_view text);

}  // namespace vinesar::csv
