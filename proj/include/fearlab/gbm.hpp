#pragma once

#include "fearlab/dataset.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fearlab {

struct GbmConfig {
    double learning_rate = 0.1;
    int n_stages = 100;
    int max_depth = 3;
    int min_samples_leaf = 1;
    double subsample = 1.0;  // row fraction per stage, (0, 1]
    std::uint64_t seed = 0;

    void validate() const;
};

// Axis-aligned binary regression tree. nodes[0] is the root; leaves carry
// the (unscaled) Newton leaf estimate.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const double* row) const {
        int idx = 0;
        while (nodes[idx].feature >= 0) {
            const TreeNode& n = nodes[idx];
            idx = row[n.feature] <= n.threshold ? n.left : n.right;
        }
        return nodes[idx].value;
    }
};

constexpr int kNumClasses = 3;

// Fixed class alphabet {-1, 0, +1} mapped to indices {0, 1, 2}.
inline int class_index(int label) { return label + 1; }
inline int class_label(int index) { return index - 1; }

// Highest-scoring class index; ties resolve toward label 0, then -1, then +1.
inline int argmax_class(const std::array<double, kNumClasses>& scores) {
    constexpr int preference[kNumClasses] = {1, 0, 2};
    int best = preference[0];
    for (int k = 1; k < kNumClasses; ++k)
        if (scores[preference[k]] > scores[best]) best = preference[k];
    return best;
}

struct GbmModel {
    GbmConfig config;
    std::array<int, kNumClasses> classes{-1, 0, +1};
    std::array<double, kNumClasses> base_scores{};
    // stage-major: trees[stage * kNumClasses + class_index]
    std::vector<RegressionTree> trees;

    int n_stages_trained() const { return static_cast<int>(trees.size()) / kNumClasses; }
    std::size_t expected_width = 0;
};

struct Prediction {
    std::vector<std::int8_t> labels;
    std::vector<std::array<double, kNumClasses>> probabilities;
};

// Multinomial-deviance boosting: per-class log-prior base scores, one
// regression tree per class per stage fit to softmax residuals, Newton leaf
// estimates, scores advanced by learning_rate times the leaf value.
GbmModel fit(const LabeledDataset& train, const GbmConfig& config);

Prediction predict(const GbmModel& model, const std::vector<double>& features,
                   std::size_t width);
Prediction predict(const GbmModel& model, const LabeledDataset& ds);

double accuracy(const GbmModel& model, const LabeledDataset& ds);

// Training cross-entropy after the base and after each stage, replayed from
// the stored trees.
std::vector<double> staged_training_loss(const GbmModel& model, const LabeledDataset& ds);

std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& scores);

struct CvResult {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    // Folds whose held-out targets are single-class; reported, not fatal.
    std::vector<std::size_t> single_class_folds;
};

// Contiguous chronological folds, each held out once, no shuffling.
CvResult cross_validate(const LabeledDataset& ds, const GbmConfig& config, std::size_t folds = 5);

struct SearchSpace {
    double learning_rate_min = 0.01;  // sampled log-uniformly
    double learning_rate_max = 0.3;
    int n_stages_min = 50;
    int n_stages_max = 500;
    int max_depth_min = 2;
    int max_depth_max = 6;
    int min_samples_leaf = 1;
    double subsample = 1.0;
    std::size_t folds = 5;
};

struct SearchTrial {
    GbmConfig config;
    double mean_cv_accuracy = 0.0;
};

struct SearchResult {
    GbmConfig best;
    double best_score = 0.0;
    std::vector<SearchTrial> trials;
};

SearchResult random_search(const LabeledDataset& ds, const SearchSpace& space,
                           std::size_t trials, std::uint64_t seed);

struct SearchGrid {
    std::vector<double> learning_rates;
    std::vector<int> n_stages;
    std::vector<int> max_depths;
    int min_samples_leaf = 1;
    double subsample = 1.0;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
};

// Exhaustive Cartesian evaluation; score ties resolve toward fewer stages,
// then shallower depth, then larger learning rate.
SearchResult grid_search(const LabeledDataset& ds, const SearchGrid& grid);

void save_model(const std::string& path, const GbmModel& model);
GbmModel load_model(const std::string& path);

void write_search_log(const std::string& path, const SearchResult& result);

}  // namespace fearlab
