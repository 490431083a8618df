#pragma once

#include "fearlab/labeling.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fearlab {

struct FeatureName {
    std::string series;
    int lag = 0;  // 0 = the sample instant, k = k steps earlier

    // Figure-style display label, e.g. "vxbt_direction,t-3".
    std::string display() const { return series + "_direction,t-" + std::to_string(lag); }
    // Header-safe label (no comma), e.g. "vxbt_direction_t-3".
    std::string column() const { return series + "_direction_t-" + std::to_string(lag); }

    bool operator==(const FeatureName&) const = default;
};

// Row-major sample matrix of ternary directions cast to reals, one target
// direction per row, timestamps strictly increasing.
struct LabeledDataset {
    std::vector<FeatureName> feature_names;
    std::vector<double> features;     // samples() x width(), row-major
    std::vector<std::int8_t> targets;  // each in {-1, 0, +1}
    std::vector<UtcSeconds> timestamps;

    std::size_t width() const { return feature_names.size(); }
    std::size_t samples() const { return targets.size(); }
    const double* row(std::size_t i) const { return features.data() + i * width(); }
    double* row(std::size_t i) { return features.data() + i * width(); }
};

// Sample at direction-slot t: features are every series' directions at
// t-window+1 .. t (lag window-1 .. 0), target is the target series'
// direction at t+horizon. Columns are grouped per series, lag 0 first.
LabeledDataset windowize(const std::vector<std::pair<std::string, DirectionSeries>>& directions,
                         const std::string& target_series, std::size_t window = 24,
                         std::size_t horizon = 1);

struct SplitDataset {
    LabeledDataset train;
    LabeledDataset test;
};

// Plain chronological split at floor(train_fraction * samples); no shuffle.
SplitDataset chrono_split(const LabeledDataset& ds, double train_fraction = 0.9);

// Copy of rows [begin, end); feature names are shared unchanged.
LabeledDataset slice_rows(const LabeledDataset& ds, std::size_t begin, std::size_t end);

void write_dataset(const std::string& features_path, const std::string& targets_path,
                   const std::string& manifest_path, const LabeledDataset& ds);
LabeledDataset read_dataset(const std::string& features_path, const std::string& targets_path,
                            const std::string& manifest_path);

}  // namespace fearlab
