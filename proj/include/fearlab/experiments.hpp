#pragma once

#include "fearlab/dataset.hpp"
#include "fearlab/gbm.hpp"
#include "fearlab/importance.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fearlab {

struct ConfusionMatrix {
    // counts[actual class index][predicted class index], classes {-1, 0, +1}.
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

    std::size_t total() const;
    std::size_t actual_count(int class_idx) const;
};

ConfusionMatrix confusion_matrix(const GbmModel& model, const LabeledDataset& ds);

// Hyperparameter selection: random search over `space`, then a small grid
// refined around the random winner. Disabled plans fall through to `fixed`.
struct TuningPlan {
    bool enabled = true;
    std::size_t random_trials = 20;
    SearchSpace space;
    bool grid_refine = true;
    std::uint64_t seed = 0;
    GbmConfig fixed;
};

struct TuneResult {
    GbmConfig chosen;
    SearchResult random_stage;  // trials empty when tuning is disabled
    SearchResult grid_stage;    // trials empty when refinement is skipped
};

// Random search over the plan's space, then a small grid refined around the
// random winner. A disabled plan returns `fixed` untouched.
TuneResult tune(const LabeledDataset& train, const TuningPlan& plan);

struct HeadlineParams {
    std::size_t window = 24;
    std::size_t horizon = 1;
    double train_fraction = 0.9;
    TuningPlan tuning;
    std::size_t importance_repeats = 10;
};

struct HeadlineResult {
    GbmConfig chosen_config;
    SearchResult random_stage;  // trials empty when tuning is disabled
    SearchResult grid_stage;    // trials empty when refinement is skipped
    double test_accuracy = 0.0;
    ConfusionMatrix confusion;
    ImportanceReport importance;
    std::size_t train_samples = 0;
    std::size_t test_samples = 0;
};

// Dataset build, chronological split, tuned fit, then test-set evaluation:
// accuracy, confusion matrix, permutation importance.
HeadlineResult run_headline(const std::vector<std::pair<std::string, DirectionSeries>>& directions,
                            const std::string& target_series, const HeadlineParams& params);

struct SweepPoint {
    std::size_t window_steps = 0;
    double mean_cv_accuracy = 0.0;
    double std_dev = 0.0;
    double wall_seconds = 0.0;  // informational only; never serialized
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::vector<SweepPoint> rows;
};

struct SweepParams {
    std::vector<std::size_t> windows;  // strictly increasing
    std::size_t horizon = 1;
    double train_fraction = 0.9;  // cross-validation runs on this span only
    GbmConfig model;              // one config reused at every point
    std::size_t folds = 5;
};

// Cross-validated accuracy as a function of lookback window. Every window is
// evaluated over the same prediction instants (those reachable by the largest
// window), so fold boundaries line up and window size is the only variable.
SweepResult window_sweep(const std::vector<std::pair<std::string, DirectionSeries>>& directions,
                         const std::string& target_series, const SweepParams& params);

// Columns: window_steps,window_minutes,mean_cv_accuracy,std. Failed points
// keep their window columns and leave the metric cells empty.
void write_sweep_csv(const std::string& path, const SweepResult& result,
                     std::int64_t interval_seconds);

}  // namespace fearlab
