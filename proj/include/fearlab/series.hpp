#pragma once

#include "fearlab/time_utils.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace fearlab {

// Fixed-interval real-valued series. Gaps are carried as quiet NaN; the
// timestamp of values[k] is start + k * interval.
struct UniformSeries {
    UtcSeconds start = 0;
    std::int64_t interval = kFiveMinutes;  // seconds
    std::vector<double> values;

    static constexpr double gap() { return std::numeric_limits<double>::quiet_NaN(); }
    static bool is_gap(double v) { return std::isnan(v); }

    std::size_t size() const { return values.size(); }
    UtcSeconds timestamp(std::size_t i) const {
        return start + static_cast<std::int64_t>(i) * interval;
    }
    std::size_t gap_count() const;

    bool same_grid(const UniformSeries& other) const {
        return start == other.start && interval == other.interval &&
               values.size() == other.values.size();
    }
};

// Interior gaps take the previous value; leading gaps take the first
// observed value. Returns the number of points filled.
std::size_t fill_gaps(UniformSeries& series);

// CSV `timestamp,value` with an empty value field for gaps.
void write_series_csv(const std::string& path, const UniformSeries& series);
UniformSeries read_series_csv(const std::string& path);

}  // namespace fearlab
