#pragma once

#include "fearlab/dataset.hpp"
#include "fearlab/gbm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fearlab {

struct ImportanceEntry {
    FeatureName feature;
    double mean_drop = 0.0;
    double std_drop = 0.0;
    std::size_t repeats = 0;
};

// Entries are sorted by mean_drop descending; ties keep dataset column order.
struct ImportanceReport {
    double baseline_accuracy = 0.0;
    std::vector<ImportanceEntry> entries;
};

struct ImportanceParams {
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    // Test hook: use the identity permutation instead of shuffling, in which
    // case every drop is exactly zero.
    bool identity_permutations = false;
};

// Accuracy drop caused by shuffling one feature column at a time, evaluated
// on `test`, averaged over fresh permutations. Each feature draws from its
// own RNG stream derived from (seed, column index), so evaluation order and
// parallelism never change the result.
ImportanceReport permutation_importance(const GbmModel& model, const LabeledDataset& test,
                                        const ImportanceParams& params);

// Restrict a report to the named series, preserving entry order. Baseline is
// unchanged; no retraining happens.
ImportanceReport filter_series(const ImportanceReport& report,
                               const std::vector<std::string>& keep_series);

// Columns: feature,lag,mean_drop,std_drop. top_k = 0 writes every entry.
void write_importance_csv(const std::string& path, const ImportanceReport& report,
                          std::size_t top_k = 0);

}  // namespace fearlab
