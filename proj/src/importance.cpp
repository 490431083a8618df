#include "fearlab/importance.hpp"

#include "fearlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace fearlab {

namespace {

std::uint64_t feature_stream_seed(std::uint64_t seed, std::uint64_t feature) {
    // splitmix64 step keyed by the column index.
    std::uint64_t z = seed + feature * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

ImportanceReport permutation_importance(const GbmModel& model, const LabeledDataset& test,
                                        const ImportanceParams& params) {
    if (test.samples() == 0)
        throw std::invalid_argument("permutation_importance: empty test set");
    if (test.width() != model.expected_width)
        throw std::invalid_argument("permutation_importance: feature width mismatch");
    if (params.repeats < 1)
        throw std::invalid_argument("permutation_importance: repeats must be >= 1");

    const std::size_t n = test.samples();
    const std::size_t width = test.width();
    const std::size_t n_trees = model.trees.size();
    const double lr = model.config.learning_rate;

    // Per-row class scores and per-tree raw outputs on the untouched test
    // set. Shuffling column f only disturbs trees that split on f, so the
    // permuted score is the baseline score plus the affected trees' deltas.
    std::vector<std::array<double, kNumClasses>> base_row_scores(n, model.base_scores);
    std::vector<double> tree_out(n_trees * n);
    for (std::size_t t = 0; t < n_trees; ++t) {
        const int c = static_cast<int>(t % kNumClasses);
        for (std::size_t i = 0; i < n; ++i) {
            double p = model.trees[t].predict(test.row(i));
            tree_out[t * n + i] = p;
            base_row_scores[i][c] += lr * p;
        }
    }

    std::size_t baseline_hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (class_label(argmax_class(base_row_scores[i])) == test.targets[i]) ++baseline_hits;
    const double baseline = static_cast<double>(baseline_hits) / static_cast<double>(n);

    std::vector<std::vector<std::uint32_t>> trees_using(width);
    for (std::size_t t = 0; t < n_trees; ++t) {
        std::set<int> in_tree;
        for (const TreeNode& node : model.trees[t].nodes)
            if (node.feature >= 0) in_tree.insert(node.feature);
        for (int f : in_tree) trees_using[f].push_back(static_cast<std::uint32_t>(t));
    }

    auto evaluate_feature = [&](std::size_t f) {
        std::mt19937_64 rng(feature_stream_seed(params.seed, f));
        std::vector<std::uint32_t> perm(n);
        std::vector<double> row_buf(width);
        std::vector<double> drops(params.repeats);

        for (std::size_t rep = 0; rep < params.repeats; ++rep) {
            std::iota(perm.begin(), perm.end(), 0u);
            if (!params.identity_permutations) std::shuffle(perm.begin(), perm.end(), rng);

            std::size_t hits = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::array<double, kNumClasses> score = base_row_scores[i];
                const double shuffled_value = test.features[perm[i] * width + f];
                if (!trees_using[f].empty() && shuffled_value != test.features[i * width + f]) {
                    std::copy(test.row(i), test.row(i) + width, row_buf.begin());
                    row_buf[f] = shuffled_value;
                    for (std::uint32_t t : trees_using[f]) {
                        double p = model.trees[t].predict(row_buf.data());
                        score[t % kNumClasses] += lr * (p - tree_out[t * n + i]);
                    }
                }
                if (class_label(argmax_class(score)) == test.targets[i]) ++hits;
            }
            drops[rep] = baseline - static_cast<double>(hits) / static_cast<double>(n);
        }

        double mean = std::accumulate(drops.begin(), drops.end(), 0.0) /
                      static_cast<double>(params.repeats);
        double var = 0.0;
        for (double d : drops) var += (d - mean) * (d - mean);
        var /= static_cast<double>(params.repeats);

        ImportanceEntry entry;
        entry.feature = test.feature_names[f];
        entry.mean_drop = mean;
        entry.std_drop = std::sqrt(var);
        entry.repeats = params.repeats;
        return entry;
    };

    ImportanceReport report;
    report.baseline_accuracy = baseline;
    report.entries.resize(width);
    std::vector<std::future<ImportanceEntry>> futures(width);
    for (std::size_t f = 0; f < width; ++f)
        futures[f] = std::async(std::launch::async, evaluate_feature, f);
    for (std::size_t f = 0; f < width; ++f) report.entries[f] = futures[f].get();

    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const ImportanceEntry& a, const ImportanceEntry& b) {
                         return a.mean_drop > b.mean_drop;
                     });
    return report;
}

ImportanceReport filter_series(const ImportanceReport& report,
                               const std::vector<std::string>& keep_series) {
    ImportanceReport out;
    out.baseline_accuracy = report.baseline_accuracy;
    for (const ImportanceEntry& entry : report.entries) {
        if (std::find(keep_series.begin(), keep_series.end(), entry.feature.series) !=
            keep_series.end())
            out.entries.push_back(entry);
    }
    return out;
}

void write_importance_csv(const std::string& path, const ImportanceReport& report,
                          std::size_t top_k) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "feature,lag,mean_drop,std_drop\n";
    std::size_t limit = top_k == 0 ? report.entries.size()
                                   : std::min(top_k, report.entries.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const ImportanceEntry& e = report.entries[i];
        out << e.feature.series << ',' << e.feature.lag << ',' << format_double(e.mean_drop)
            << ',' << format_double(e.std_drop) << '\n';
    }
}

}  // namespace fearlab
