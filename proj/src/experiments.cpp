#include "fearlab/experiments.hpp"

#include "fearlab/csv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace fearlab {

namespace {

std::vector<double> refine_axis(double center, double lo, double hi) {
    std::vector<double> values{0.5 * center, center, 1.5 * center};
    for (double& v : values) v = std::clamp(v, lo, hi);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::vector<int> refine_axis(int center, int step, int lo, int hi) {
    std::vector<int> values{center - step, center, center + step};
    for (int& v : values) v = std::clamp(v, lo, hi);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

double fold_std(const std::vector<double>& accs, double mean) {
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    return std::sqrt(var / static_cast<double>(accs.size()));
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t sum = 0;
    for (const auto& row : counts)
        for (std::size_t c : row) sum += c;
    return sum;
}

std::size_t ConfusionMatrix::actual_count(int class_idx) const {
    std::size_t sum = 0;
    for (std::size_t c : counts[class_idx]) sum += c;
    return sum;
}

ConfusionMatrix confusion_matrix(const GbmModel& model, const LabeledDataset& ds) {
    Prediction pred = predict(model, ds);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < ds.samples(); ++i)
        ++cm.counts[class_index(ds.targets[i])][class_index(pred.labels[i])];
    return cm;
}

TuneResult tune(const LabeledDataset& train, const TuningPlan& plan) {
    TuneResult result;
    if (!plan.enabled) {
        result.chosen = plan.fixed;
        return result;
    }
    result.random_stage = random_search(train, plan.space, plan.random_trials, plan.seed);
    result.chosen = result.random_stage.best;
    if (plan.grid_refine) {
        const GbmConfig& center = result.random_stage.best;
        const SearchSpace& space = plan.space;
        SearchGrid grid;
        grid.learning_rates =
            refine_axis(center.learning_rate, space.learning_rate_min, space.learning_rate_max);
        grid.n_stages = refine_axis(center.n_stages, 50, space.n_stages_min, space.n_stages_max);
        grid.max_depths =
            refine_axis(center.max_depth, 1, space.max_depth_min, space.max_depth_max);
        grid.min_samples_leaf = space.min_samples_leaf;
        grid.subsample = space.subsample;
        grid.folds = space.folds;
        grid.seed = plan.seed;
        result.grid_stage = grid_search(train, grid);
        result.chosen = result.grid_stage.best;
    }
    return result;
}

HeadlineResult run_headline(const std::vector<std::pair<std::string, DirectionSeries>>& directions,
                            const std::string& target_series, const HeadlineParams& params) {
    LabeledDataset ds = windowize(directions, target_series, params.window, params.horizon);
    SplitDataset split = chrono_split(ds, params.train_fraction);

    HeadlineResult result;
    TuneResult tuned = tune(split.train, params.tuning);
    result.chosen_config = tuned.chosen;
    result.random_stage = std::move(tuned.random_stage);
    result.grid_stage = std::move(tuned.grid_stage);

    GbmModel model = fit(split.train, result.chosen_config);
    result.test_accuracy = accuracy(model, split.test);
    result.confusion = confusion_matrix(model, split.test);

    ImportanceParams imp;
    imp.repeats = params.importance_repeats;
    imp.seed = params.tuning.seed;
    result.importance = permutation_importance(model, split.test, imp);

    result.train_samples = split.train.samples();
    result.test_samples = split.test.samples();
    return result;
}

SweepResult window_sweep(const std::vector<std::pair<std::string, DirectionSeries>>& directions,
                         const std::string& target_series, const SweepParams& params) {
    if (params.windows.empty()) throw std::invalid_argument("window_sweep: no windows given");
    for (std::size_t i = 1; i < params.windows.size(); ++i)
        if (params.windows[i] <= params.windows[i - 1])
            throw std::invalid_argument("window_sweep: windows must be strictly increasing");

    const std::size_t max_window = params.windows.back();
    SweepResult result;
    for (std::size_t w : params.windows) {
        SweepPoint point;
        point.window_steps = w;
        const auto started = std::chrono::steady_clock::now();
        try {
            LabeledDataset ds = windowize(directions, target_series, w, params.horizon);
            // Trim to the instants the largest window can also reach, so
            // every point scores the same targets with the same folds.
            ds = slice_rows(ds, max_window - w, ds.samples());
            SplitDataset split = chrono_split(ds, params.train_fraction);
            CvResult cv = cross_validate(split.train, params.model, params.folds);
            point.mean_cv_accuracy = cv.mean_accuracy;
            point.std_dev = fold_std(cv.fold_accuracies, cv.mean_accuracy);
        } catch (const std::exception& ex) {
            point.failed = true;
            point.error = ex.what();
        }
        point.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.rows.push_back(std::move(point));
    }
    return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result,
                     std::int64_t interval_seconds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "window_steps,window_minutes,mean_cv_accuracy,std\n";
    for (const SweepPoint& point : result.rows) {
        double minutes =
            static_cast<double>(point.window_steps) * static_cast<double>(interval_seconds) / 60.0;
        out << point.window_steps << ',' << format_double(minutes) << ',';
        if (point.failed)
            out << ',';
        else
            out << format_double(point.mean_cv_accuracy) << ',' << format_double(point.std_dev);
        out << '\n';
    }
}

}  // namespace fearlab
