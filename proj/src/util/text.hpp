#pragma once

#include "specnet/tensor.hpp"

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace specnet::text {

inline std::string strip_cr(std::string line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

/// Comma split without quoting; cells keep surrounding whitespace trimmed.
inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view cell = line.substr(start, comma == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
            cell.remove_prefix(1);
        }
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) {
            cell.remove_suffix(1);
        }
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

/// Tries to parse the whole cell as a double.
inline bool try_parse_double(std::string_view cell, double& value)
{
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    return ec == std::errc() && ptr == end && !cell.empty();
}

inline double parse_double(std::string_view cell, const std::string& where)
{
    double value = 0.0;
    if (!try_parse_double(cell, value)) {
        throw Error(where + ": non-numeric value '" + std::string(cell) + "'");
    }
    return value;
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

/// Fixed-precision decimal, for human-facing reports.
inline std::string format_fixed(double value, int digits)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                         std::chars_format::fixed, digits);
    return std::string(buffer, ptr);
}

} // namespace specnet::text
