#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fearlab {

// All timestamps are UTC seconds since the Unix epoch.
using UtcSeconds = std::int64_t;

constexpr std::int64_t kSecondsPerMinute = 60;
constexpr std::int64_t kSecondsPerHour = 3600;
constexpr std::int64_t kSecondsPerDay = 86400;
constexpr std::int64_t kFiveMinutes = 300;

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]", "YYYY-MM-DDTHH:MM[:SS]",
// with an optional trailing "Z" and optional fractional seconds (truncated).
std::optional<UtcSeconds> parse_iso8601(std::string_view text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(UtcSeconds ts);

// Days since epoch for a civil date and back (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// 0 = Sunday .. 6 = Saturday.
int weekday_utc(UtcSeconds ts);

// Deribit weekly convention: expiries land on Fridays at 08:00 UTC.
bool is_friday_0800(UtcSeconds ts);

struct TimeGrid {
    UtcSeconds start = 0;
    std::int64_t interval = kFiveMinutes;  // seconds
    std::size_t count = 0;

    UtcSeconds at(std::size_t i) const { return start + static_cast<std::int64_t>(i) * interval; }
    UtcSeconds end() const { return at(count == 0 ? 0 : count - 1); }

    // Bucket index for a timestamp, or nullopt when outside [start, start + count*interval).
    std::optional<std::size_t> bucket(UtcSeconds ts) const;

    // Grid covering [start, end] inclusive at the given interval.
    static TimeGrid spanning(UtcSeconds start, UtcSeconds end, std::int64_t interval);
};

}  // namespace fearlab
