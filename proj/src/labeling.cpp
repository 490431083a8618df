#include "fearlab/labeling.hpp"

#include "fearlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fearlab {

namespace {

constexpr double kDenominatorGuard = 1e-9;

std::vector<double> percentage_changes(const UniformSeries& series) {
    if (series.size() < 2)
        throw std::invalid_argument("need at least 2 observations to compute changes");
    std::vector<double> changes;
    changes.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) {
        double prev = series.values[i - 1];
        double cur = series.values[i];
        if (UniformSeries::is_gap(prev) || UniformSeries::is_gap(cur))
            throw std::invalid_argument("series has gaps; fill before labeling");
        changes.push_back((cur - prev) / std::max(std::abs(prev), kDenominatorGuard));
    }
    return changes;
}

std::array<std::size_t, 3> count_classes(const std::vector<double>& changes, double theta) {
    std::array<std::size_t, 3> counts{};  // down, flat, up
    for (double r : changes) {
        if (r > theta)
            ++counts[2];
        else if (r < -theta)
            ++counts[0];
        else
            ++counts[1];
    }
    return counts;
}

std::size_t imbalance_of(const std::array<std::size_t, 3>& counts) {
    auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    return *hi - *lo;
}

}  // namespace

UniformSeries minmax_normalize(const UniformSeries& series, IndexRange fit_range) {
    if (fit_range.begin >= fit_range.end || fit_range.end > series.size())
        throw std::invalid_argument("minmax_normalize: bad fit range");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = fit_range.begin; i < fit_range.end; ++i) {
        double v = series.values[i];
        if (UniformSeries::is_gap(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo))
        throw std::invalid_argument("minmax_normalize: constant (or empty) fit range");

    UniformSeries out = series;
    const double scale = hi - lo;
    for (double& v : out.values) {
        if (!UniformSeries::is_gap(v)) v = (v - lo) / scale;
    }
    return out;
}

DirectionSeries label_directions(const UniformSeries& series, double theta) {
    if (theta < 0.0) throw std::invalid_argument("label_directions: theta must be >= 0");
    auto changes = percentage_changes(series);

    DirectionSeries out;
    out.start = series.start + series.interval;
    out.interval = series.interval;
    out.labels.reserve(changes.size());
    for (double r : changes) {
        if (r > theta)
            out.labels.push_back(+1);
        else if (r < -theta)
            out.labels.push_back(-1);
        else
            out.labels.push_back(0);
    }
    return out;
}

ThresholdFit fit_threshold(const UniformSeries& series) {
    if (series.size() < 3) throw std::invalid_argument("fit_threshold: series too short");
    auto changes = percentage_changes(series);

    std::vector<double> candidates;
    candidates.reserve(changes.size());
    for (double r : changes) candidates.push_back(std::abs(r));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    ThresholdFit best;
    if (candidates.size() == 1 && candidates.front() == 0.0) {
        // Constant series: every change is zero, nothing to balance.
        best.theta = 0.0;
        best.class_counts = count_classes(changes, 0.0);
        best.imbalance = imbalance_of(best.class_counts);
        best.degenerate = true;
        return best;
    }

    bool first = true;
    for (double theta : candidates) {
        auto counts = count_classes(changes, theta);
        std::size_t imbalance = imbalance_of(counts);
        if (first || imbalance < best.imbalance) {
            best.theta = theta;
            best.class_counts = counts;
            best.imbalance = imbalance;
            first = false;
        }
    }
    return best;
}

void write_directions_csv(const std::string& path, const DirectionSeries& directions) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "timestamp,label\n";
    for (std::size_t i = 0; i < directions.size(); ++i) {
        out << format_iso8601(directions.start + static_cast<std::int64_t>(i) * directions.interval)
            << ',' << static_cast<int>(directions.labels[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DirectionSeries read_directions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty directions file: " + path);

    DirectionSeries out;
    std::vector<UtcSeconds> stamps;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 2) throw std::runtime_error("bad directions row in " + path);
        auto ts = parse_iso8601(fields[0]);
        auto v = parse_double(fields[1]);
        if (!ts || !v || (*v != -1.0 && *v != 0.0 && *v != 1.0))
            throw std::runtime_error("bad directions row in " + path + ": " + line);
        stamps.push_back(*ts);
        out.labels.push_back(static_cast<std::int8_t>(*v));
    }
    if (stamps.empty()) throw std::runtime_error("directions file has no rows: " + path);
    out.start = stamps.front();
    out.interval = stamps.size() > 1 ? stamps[1] - stamps[0] : kFiveMinutes;
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        if (stamps[i] != out.start + static_cast<std::int64_t>(i) * out.interval)
            throw std::runtime_error("directions not on a uniform grid: " + path);
    }
    return out;
}

}  // namespace fearlab
