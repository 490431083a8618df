#include "fearlab/time_utils.hpp"

#include <cstdio>
#include <stdexcept>

namespace fearlab {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    year = static_cast<int>(y + (month <= 2));
}

namespace {

int days_in_month(int year, int month) {
    static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month != 2) return lengths[month - 1];
    const bool leap = year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
    return leap ? 29 : 28;
}

bool read_int(std::string_view text, std::size_t& pos, int digits, int& out) {
    if (pos + static_cast<std::size_t>(digits) > text.size()) return false;
    int v = 0;
    for (int i = 0; i < digits; ++i) {
        char c = text[pos + static_cast<std::size_t>(i)];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += static_cast<std::size_t>(digits);
    out = v;
    return true;
}

}  // namespace

std::optional<UtcSeconds> parse_iso8601(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    std::size_t pos = 0;
    int year = 0, month = 0, day = 0;
    if (!read_int(text, pos, 4, year)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, month)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, day)) return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        return std::nullopt;

    int hour = 0, minute = 0, second = 0;
    if (pos < text.size()) {
        char sep = text[pos];
        if (sep != 'T' && sep != ' ') return std::nullopt;
        ++pos;
        if (!read_int(text, pos, 2, hour)) return std::nullopt;
        if (pos >= text.size() || text[pos] != ':') return std::nullopt;
        ++pos;
        if (!read_int(text, pos, 2, minute)) return std::nullopt;
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            if (!read_int(text, pos, 2, second)) return std::nullopt;
            if (pos < text.size() && text[pos] == '.') {
                ++pos;
                while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
            }
        }
        if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) ++pos;
        if (pos < text.size() && text.substr(pos) == "+00:00") pos = text.size();
        if (pos != text.size()) return std::nullopt;
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    }

    return days_from_civil(year, month, day) * kSecondsPerDay + hour * kSecondsPerHour +
           minute * kSecondsPerMinute + second;
}

std::string format_iso8601(UtcSeconds ts) {
    std::int64_t days = ts / kSecondsPerDay;
    std::int64_t rem = ts % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / kSecondsPerHour),
                  static_cast<int>((rem / kSecondsPerMinute) % 60), static_cast<int>(rem % 60));
    return buf;
}

int weekday_utc(UtcSeconds ts) {
    std::int64_t days = ts / kSecondsPerDay;
    if (ts % kSecondsPerDay < 0) --days;
    // 1970-01-01 was a Thursday.
    return static_cast<int>(((days % 7) + 7 + 4) % 7);
}

bool is_friday_0800(UtcSeconds ts) {
    std::int64_t rem = ts % kSecondsPerDay;
    if (rem < 0) rem += kSecondsPerDay;
    return weekday_utc(ts) == 5 && rem == 8 * kSecondsPerHour;
}

std::optional<std::size_t> TimeGrid::bucket(UtcSeconds ts) const {
    if (interval <= 0 || count == 0 || ts < start) return std::nullopt;
    std::int64_t k = (ts - start) / interval;
    if (k >= static_cast<std::int64_t>(count)) return std::nullopt;
    return static_cast<std::size_t>(k);
}

TimeGrid TimeGrid::spanning(UtcSeconds start, UtcSeconds end, std::int64_t interval) {
    if (interval <= 0) throw std::invalid_argument("TimeGrid: interval must be positive");
    if (end < start) throw std::invalid_argument("TimeGrid: end precedes start");
    TimeGrid grid;
    grid.start = start;
    grid.interval = interval;
    grid.count = static_cast<std::size_t>((end - start) / interval) + 1;
    return grid;
}

}  // namespace fearlab
