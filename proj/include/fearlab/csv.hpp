#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fearlab {

std::vector<std::string> split_csv_line(std::string_view line, char delimiter = ',');

std::string trim(std::string_view value);

// Shortest round-trip representation (std::to_chars), so re-parsing yields the
// exact same double and repeated runs emit identical bytes.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);

}  // namespace fearlab
