#include "fearlab/csv.hpp"

#include <charconv>
#include <cstdlib>

namespace fearlab {

std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string token;
    for (char ch : line) {
        if (ch == delimiter) {
            fields.push_back(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    fields.push_back(token);
    return fields;
}

std::string trim(std::string_view value) {
    const auto first = value.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = value.find_last_not_of(" \t\r\n");
    return std::string(value.substr(first, last - first + 1));
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view text) {
    std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

}  // namespace fearlab
