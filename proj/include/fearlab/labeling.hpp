#pragma once

#include "fearlab/series.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fearlab {

// Ternary movement labels, one interval after the source series start: the
// label at slot t encodes the move from t-1 to t, so the first observation
// has no label.
struct DirectionSeries {
    UtcSeconds start = 0;
    std::int64_t interval = kFiveMinutes;
    std::vector<std::int8_t> labels;  // each in {-1, 0, +1}

    std::size_t size() const { return labels.size(); }
    bool same_grid(const DirectionSeries& other) const {
        return start == other.start && interval == other.interval &&
               labels.size() == other.labels.size();
    }
};

struct ThresholdFit {
    double theta = 0.0;
    std::array<std::size_t, 3> class_counts{};  // {down, flat, up}
    std::size_t imbalance = 0;                  // max count - min count
    bool degenerate = false;                    // constant series, no usable candidates
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // half-open
};

// Affine map fit on [range.begin, range.end) only; values outside that range
// may leave [0, 1]. Throws when the fit range is constant (or all gaps).
UniformSeries minmax_normalize(const UniformSeries& series, IndexRange fit_range);

// label = +1 when (v_t - v_{t-1}) / max(|v_{t-1}|, 1e-9) > theta, -1 below
// -theta, 0 otherwise. Requires a dense series.
DirectionSeries label_directions(const UniformSeries& series, double theta);

// Scans every distinct absolute percentage change as a candidate threshold
// and returns the one minimising (max class count - min class count), ties
// toward the smaller theta.
ThresholdFit fit_threshold(const UniformSeries& series);

void write_directions_csv(const std::string& path, const DirectionSeries& directions);
DirectionSeries read_directions_csv(const std::string& path);

}  // namespace fearlab
