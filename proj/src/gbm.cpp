#include "fearlab/gbm.hpp"

#include "fearlab/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace fearlab {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step; decorrelates derived streams.
    std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SplitCandidate {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy split on squared error. Gain = sum_l^2/n_l + sum_r^2/n_r,
// maximised; a ternary-value fast path avoids per-node sorting since the
// direction features only take values in {-1, 0, +1}.
class TreeBuilder {
public:
    TreeBuilder(const double* features, std::size_t width, const std::vector<double>& residuals,
                const std::vector<double>& hessians, int max_depth, int min_samples_leaf)
        : features_(features),
          width_(width),
          residuals_(residuals),
          hessians_(hessians),
          max_depth_(max_depth),
          min_leaf_(min_samples_leaf) {}

    RegressionTree build(std::vector<std::uint32_t> rows) {
        RegressionTree tree;
        grow(tree, std::move(rows), 0);
        return tree;
    }

private:
    int grow(RegressionTree& tree, std::vector<std::uint32_t> rows, int depth) {
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        SplitCandidate split;
        if (depth < max_depth_ && rows.size() >= 2 * static_cast<std::size_t>(min_leaf_))
            split = best_split(rows);

        if (!split.found) {
            tree.nodes[node_index].value = leaf_value(rows);
            return node_index;
        }

        std::vector<std::uint32_t> left, right;
        left.reserve(rows.size());
        for (std::uint32_t r : rows) {
            if (features_[r * width_ + split.feature] <= split.threshold)
                left.push_back(r);
            else
                right.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[node_index].feature = split.feature;
        tree.nodes[node_index].threshold = split.threshold;
        int l = grow(tree, std::move(left), depth + 1);
        int r = grow(tree, std::move(right), depth + 1);
        tree.nodes[node_index].left = l;
        tree.nodes[node_index].right = r;
        return node_index;
    }

    SplitCandidate best_split(const std::vector<std::uint32_t>& rows) const {
        double total_sum = 0.0;
        for (std::uint32_t r : rows) total_sum += residuals_[r];
        const double n = static_cast<double>(rows.size());
        const double parent_score = total_sum * total_sum / n;

        SplitCandidate best;
        for (std::size_t f = 0; f < width_; ++f) {
            auto ternary = ternary_split(rows, f, parent_score, total_sum);
            SplitCandidate cand =
                ternary ? *ternary : sorted_split(rows, f, parent_score, total_sum);
            if (cand.found && (!best.found || cand.gain > best.gain)) best = cand;
        }
        return best;
    }

    // nullopt means the feature is not ternary-valued and the caller must use
    // the sort-based scan instead.
    std::optional<SplitCandidate> ternary_split(const std::vector<std::uint32_t>& rows,
                                                std::size_t f, double parent_score,
                                                double total_sum) const {
        double sum[3] = {0, 0, 0};
        std::size_t count[3] = {0, 0, 0};
        for (std::uint32_t r : rows) {
            double v = features_[r * width_ + f];
            int bin;
            if (v == -1.0)
                bin = 0;
            else if (v == 0.0)
                bin = 1;
            else if (v == 1.0)
                bin = 2;
            else
                return std::nullopt;
            sum[bin] += residuals_[r];
            ++count[bin];
        }

        SplitCandidate best;
        double left_sum = 0.0;
        std::size_t left_count = 0;
        const double thresholds[2] = {-0.5, 0.5};
        for (int cut = 0; cut < 2; ++cut) {
            left_sum += sum[cut];
            left_count += count[cut];
            std::size_t right_count = rows.size() - left_count;
            if (left_count < static_cast<std::size_t>(min_leaf_) ||
                right_count < static_cast<std::size_t>(min_leaf_))
                continue;
            if (left_count == 0 || right_count == 0) continue;
            double right_sum = total_sum - left_sum;
            double score = left_sum * left_sum / static_cast<double>(left_count) +
                           right_sum * right_sum / static_cast<double>(right_count);
            double gain = score - parent_score;
            if (gain > 1e-12 && (!best.found || gain > best.gain)) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = thresholds[cut];
                best.gain = gain;
            }
        }
        return best;
    }

    SplitCandidate sorted_split(const std::vector<std::uint32_t>& rows, std::size_t f,
                                double parent_score, double total_sum) const {
        std::vector<std::pair<double, double>> pairs;  // (value, residual)
        pairs.reserve(rows.size());
        for (std::uint32_t r : rows) pairs.emplace_back(features_[r * width_ + f], residuals_[r]);
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        SplitCandidate best;
        double left_sum = 0.0;
        for (std::size_t k = 0; k + 1 < pairs.size(); ++k) {
            left_sum += pairs[k].second;
            if (pairs[k].first == pairs[k + 1].first) continue;  // no boundary here
            std::size_t left_count = k + 1;
            std::size_t right_count = pairs.size() - left_count;
            if (left_count < static_cast<std::size_t>(min_leaf_) ||
                right_count < static_cast<std::size_t>(min_leaf_))
                continue;
            double right_sum = total_sum - left_sum;
            double score = left_sum * left_sum / static_cast<double>(left_count) +
                           right_sum * right_sum / static_cast<double>(right_count);
            double gain = score - parent_score;
            if (gain > 1e-12 && (!best.found || gain > best.gain)) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (pairs[k].first + pairs[k + 1].first);
                best.gain = gain;
            }
        }
        return best;
    }

    // Newton step for multinomial deviance:
    //   gamma = (K-1)/K * sum(r) / sum(|r| (1 - |r|))
    double leaf_value(const std::vector<std::uint32_t>& rows) const {
        double num = 0.0, den = 0.0;
        for (std::uint32_t r : rows) {
            num += residuals_[r];
            den += hessians_[r];
        }
        if (den < 1e-150) return 0.0;
        constexpr double k = static_cast<double>(kNumClasses);
        return (k - 1.0) / k * num / den;
    }

    const double* features_;
    std::size_t width_;
    const std::vector<double>& residuals_;
    const std::vector<double>& hessians_;
    int max_depth_;
    int min_leaf_;
};

void check_features_finite(const LabeledDataset& ds) {
    for (double v : ds.features) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite feature value");
    }
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
    LabeledDataset out;
    out.feature_names = a.feature_names;
    out.features = a.features;
    out.features.insert(out.features.end(), b.features.begin(), b.features.end());
    out.targets = a.targets;
    out.targets.insert(out.targets.end(), b.targets.begin(), b.targets.end());
    out.timestamps = a.timestamps;
    out.timestamps.insert(out.timestamps.end(), b.timestamps.begin(), b.timestamps.end());
    return out;
}

}  // namespace

void GbmConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (n_stages < 1) throw std::invalid_argument("n_stages must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
    if (!(subsample > 0.0 && subsample <= 1.0))
        throw std::invalid_argument("subsample must be in (0, 1]");
}

std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& scores) {
    double m = std::max({scores[0], scores[1], scores[2]});
    std::array<double, kNumClasses> p;
    double z = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
        p[c] = std::exp(scores[c] - m);
        z += p[c];
    }
    for (int c = 0; c < kNumClasses; ++c) p[c] /= z;
    return p;
}

GbmModel fit(const LabeledDataset& train, const GbmConfig& config) {
    config.validate();
    if (train.samples() == 0) throw std::invalid_argument("fit: empty training set");
    check_features_finite(train);

    const std::size_t n = train.samples();
    const std::size_t width = train.width();

    std::array<std::size_t, kNumClasses> class_counts{};
    for (std::int8_t y : train.targets) ++class_counts[class_index(y)];
    int present = 0;
    for (std::size_t c : class_counts) present += c > 0 ? 1 : 0;
    if (present < 2) throw std::invalid_argument("fit: single-class training data");

    GbmModel model;
    model.config = config;
    model.expected_width = width;
    for (int c = 0; c < kNumClasses; ++c) {
        // Absent classes get a large negative score instead of -inf so the
        // arithmetic downstream stays finite.
        double prior = static_cast<double>(class_counts[c]) / static_cast<double>(n);
        model.base_scores[c] = class_counts[c] > 0 ? std::log(prior) : -30.0;
    }

    std::vector<std::array<double, kNumClasses>> scores(n);
    for (auto& s : scores) s = model.base_scores;

    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0u);

    std::mt19937_64 rng(config.seed);
    model.trees.reserve(static_cast<std::size_t>(config.n_stages) * kNumClasses);

    for (int stage = 0; stage < config.n_stages; ++stage) {
        // Row subset for this stage, shared by the per-class trees.
        std::vector<std::uint32_t> rows;
        if (config.subsample >= 1.0) {
            rows = all_rows;
        } else {
            std::vector<std::uint32_t> shuffled = all_rows;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            std::size_t take = std::max<std::size_t>(
                1, static_cast<std::size_t>(config.subsample * static_cast<double>(n)));
            shuffled.resize(take);
            std::sort(shuffled.begin(), shuffled.end());
            rows = std::move(shuffled);
        }

        std::vector<std::array<double, kNumClasses>> probs(n);
        for (std::size_t i = 0; i < n; ++i) probs[i] = softmax(scores[i]);

        std::array<RegressionTree, kNumClasses> stage_trees;
        auto fit_class = [&](int c) {
            std::vector<double> res(n), hess(n);
            for (std::size_t i = 0; i < n; ++i) {
                double onehot = class_index(train.targets[i]) == c ? 1.0 : 0.0;
                double r = onehot - probs[i][c];
                res[i] = r;
                hess[i] = std::abs(r) * (1.0 - std::abs(r));
            }
            TreeBuilder builder(train.features.data(), width, res, hess, config.max_depth,
                                config.min_samples_leaf);
            stage_trees[c] = builder.build(rows);
        };
        std::array<std::future<void>, kNumClasses> futures;
        for (int c = 0; c < kNumClasses; ++c)
            futures[c] = std::async(std::launch::async, fit_class, c);
        for (auto& f : futures) f.get();

        for (int c = 0; c < kNumClasses; ++c) {
            for (std::size_t i = 0; i < n; ++i)
                scores[i][c] += config.learning_rate * stage_trees[c].predict(train.row(i));
            model.trees.push_back(std::move(stage_trees[c]));
        }
    }
    return model;
}

Prediction predict(const GbmModel& model, const std::vector<double>& features,
                   std::size_t width) {
    if (width != model.expected_width)
        throw std::invalid_argument("predict: feature width mismatch (" + std::to_string(width) +
                                    " != " + std::to_string(model.expected_width) + ")");
    const std::size_t n = width == 0 ? 0 : features.size() / width;

    Prediction out;
    out.labels.resize(n);
    out.probabilities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = features.data() + i * width;
        std::array<double, kNumClasses> score = model.base_scores;
        for (std::size_t t = 0; t < model.trees.size(); ++t)
            score[t % kNumClasses] += model.config.learning_rate * model.trees[t].predict(row);
        out.probabilities[i] = softmax(score);
        out.labels[i] = static_cast<std::int8_t>(class_label(argmax_class(score)));
    }
    return out;
}

Prediction predict(const GbmModel& model, const LabeledDataset& ds) {
    return predict(model, ds.features, ds.width());
}

double accuracy(const GbmModel& model, const LabeledDataset& ds) {
    if (ds.samples() == 0) throw std::invalid_argument("accuracy: empty dataset");
    auto pred = predict(model, ds);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.samples(); ++i)
        if (pred.labels[i] == ds.targets[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ds.samples());
}

std::vector<double> staged_training_loss(const GbmModel& model, const LabeledDataset& ds) {
    const std::size_t n = ds.samples();
    std::vector<std::array<double, kNumClasses>> scores(n, model.base_scores);

    auto mean_nll = [&]() {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto p = softmax(scores[i]);
            double py = p[class_index(ds.targets[i])];
            total += -std::log(std::max(py, 1e-300));
        }
        return total / static_cast<double>(n);
    };

    std::vector<double> losses;
    losses.push_back(mean_nll());
    const int stages = model.n_stages_trained();
    for (int stage = 0; stage < stages; ++stage) {
        for (int c = 0; c < kNumClasses; ++c) {
            const RegressionTree& tree = model.trees[stage * kNumClasses + c];
            for (std::size_t i = 0; i < n; ++i)
                scores[i][c] += model.config.learning_rate * tree.predict(ds.row(i));
        }
        losses.push_back(mean_nll());
    }
    return losses;
}

CvResult cross_validate(const LabeledDataset& ds, const GbmConfig& config, std::size_t folds) {
    if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (ds.samples() < folds) throw std::invalid_argument("cross_validate: too few samples");

    const std::size_t n = ds.samples();
    auto boundary = [&](std::size_t k) { return k * n / folds; };

    CvResult result;
    result.fold_accuracies.resize(folds);
    std::vector<std::future<double>> futures(folds);
    for (std::size_t k = 0; k < folds; ++k) {
        futures[k] = std::async(std::launch::async, [&, k]() {
            const std::size_t lo = boundary(k);
            const std::size_t hi = boundary(k + 1);
            LabeledDataset held = slice_rows(ds, lo, hi);
            LabeledDataset rest = concat(slice_rows(ds, 0, lo), slice_rows(ds, hi, n));
            GbmModel model = fit(rest, config);
            return accuracy(model, held);
        });
    }
    double total = 0.0;
    for (std::size_t k = 0; k < folds; ++k) {
        result.fold_accuracies[k] = futures[k].get();
        total += result.fold_accuracies[k];

        const std::size_t lo = boundary(k);
        const std::size_t hi = boundary(k + 1);
        bool single = true;
        for (std::size_t i = lo + 1; i < hi; ++i)
            if (ds.targets[i] != ds.targets[lo]) {
                single = false;
                break;
            }
        if (single) result.single_class_folds.push_back(k);
    }
    result.mean_accuracy = total / static_cast<double>(folds);
    return result;
}

SearchResult random_search(const LabeledDataset& ds, const SearchSpace& space,
                           std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("random_search: trials must be >= 1");
    if (!(space.learning_rate_min > 0.0 && space.learning_rate_max >= space.learning_rate_min))
        throw std::invalid_argument("random_search: bad learning-rate range");
    if (space.n_stages_min < 1 || space.n_stages_max < space.n_stages_min ||
        space.max_depth_min < 1 || space.max_depth_max < space.max_depth_min)
        throw std::invalid_argument("random_search: bad integer range");

    // All configs are drawn up front from one stream so evaluation order
    // can never affect the sampled sequence.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_lr(std::log(space.learning_rate_min),
                                                  std::log(space.learning_rate_max));
    std::uniform_int_distribution<int> stages(space.n_stages_min, space.n_stages_max);
    std::uniform_int_distribution<int> depth(space.max_depth_min, space.max_depth_max);

    std::vector<GbmConfig> configs(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        configs[t].learning_rate = std::exp(log_lr(rng));
        configs[t].n_stages = stages(rng);
        configs[t].max_depth = depth(rng);
        configs[t].min_samples_leaf = space.min_samples_leaf;
        configs[t].subsample = space.subsample;
        configs[t].seed = mix_seed(seed, t);
    }

    SearchResult result;
    result.trials.resize(trials);
    std::vector<std::future<double>> futures(trials);
    for (std::size_t t = 0; t < trials; ++t)
        futures[t] = std::async(std::launch::async, [&, t]() {
            return cross_validate(ds, configs[t], space.folds).mean_accuracy;
        });
    for (std::size_t t = 0; t < trials; ++t) {
        result.trials[t] = {configs[t], futures[t].get()};
        if (t == 0 || result.trials[t].mean_cv_accuracy > result.best_score) {
            result.best = configs[t];
            result.best_score = result.trials[t].mean_cv_accuracy;
        }
    }
    return result;
}

SearchResult grid_search(const LabeledDataset& ds, const SearchGrid& grid) {
    if (grid.learning_rates.empty() || grid.n_stages.empty() || grid.max_depths.empty())
        throw std::invalid_argument("grid_search: empty grid axis");

    std::vector<GbmConfig> configs;
    for (double lr : grid.learning_rates)
        for (int stages : grid.n_stages)
            for (int depth : grid.max_depths) {
                GbmConfig c;
                c.learning_rate = lr;
                c.n_stages = stages;
                c.max_depth = depth;
                c.min_samples_leaf = grid.min_samples_leaf;
                c.subsample = grid.subsample;
                c.seed = grid.seed;
                configs.push_back(c);
            }

    SearchResult result;
    result.trials.resize(configs.size());
    std::vector<std::future<double>> futures(configs.size());
    for (std::size_t t = 0; t < configs.size(); ++t)
        futures[t] = std::async(std::launch::async, [&, t]() {
            return cross_validate(ds, configs[t], grid.folds).mean_accuracy;
        });

    bool have_best = false;
    for (std::size_t t = 0; t < configs.size(); ++t) {
        result.trials[t] = {configs[t], futures[t].get()};
        const GbmConfig& c = configs[t];
        const double score = result.trials[t].mean_cv_accuracy;
        bool better = false;
        if (!have_best || score > result.best_score) {
            better = true;
        } else if (score == result.best_score) {
            // Parsimony: fewer stages, then shallower, then larger step.
            if (c.n_stages != result.best.n_stages)
                better = c.n_stages < result.best.n_stages;
            else if (c.max_depth != result.best.max_depth)
                better = c.max_depth < result.best.max_depth;
            else
                better = c.learning_rate > result.best.learning_rate;
        }
        if (better) {
            result.best = c;
            result.best_score = score;
            have_best = true;
        }
    }
    return result;
}

namespace {

nlohmann::json tree_to_json(const RegressionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes)
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"v", n.value}});
    return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& nodes) {
    RegressionTree tree;
    for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at("f").get<int>();
        node.threshold = n.at("t").get<double>();
        node.left = n.at("l").get<int>();
        node.right = n.at("r").get<int>();
        node.value = n.at("v").get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

constexpr int kModelFormatVersion = 1;

}  // namespace

void save_model(const std::string& path, const GbmModel& model) {
    nlohmann::json obj;
    obj["format_version"] = kModelFormatVersion;
    obj["config"] = {{"learning_rate", model.config.learning_rate},
                     {"n_stages", model.config.n_stages},
                     {"max_depth", model.config.max_depth},
                     {"min_samples_leaf", model.config.min_samples_leaf},
                     {"subsample", model.config.subsample},
                     {"seed", model.config.seed}};
    obj["classes"] = model.classes;
    obj["base_scores"] = model.base_scores;
    obj["expected_width"] = model.expected_width;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
    obj["trees"] = trees;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << obj.dump(2) << '\n';
}

GbmModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model: " + path);
    nlohmann::json obj = nlohmann::json::parse(in);
    if (obj.at("format_version").get<int>() != kModelFormatVersion)
        throw std::runtime_error("unsupported model format version in " + path);

    GbmModel model;
    const auto& cfg = obj.at("config");
    model.config.learning_rate = cfg.at("learning_rate").get<double>();
    model.config.n_stages = cfg.at("n_stages").get<int>();
    model.config.max_depth = cfg.at("max_depth").get<int>();
    model.config.min_samples_leaf = cfg.at("min_samples_leaf").get<int>();
    model.config.subsample = cfg.at("subsample").get<double>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    for (int c = 0; c < kNumClasses; ++c) {
        model.classes[c] = obj.at("classes")[c].get<int>();
        model.base_scores[c] = obj.at("base_scores")[c].get<double>();
    }
    model.expected_width = obj.at("expected_width").get<std::size_t>();
    for (const auto& t : obj.at("trees")) model.trees.push_back(tree_from_json(t));
    if (model.trees.size() % kNumClasses != 0)
        throw std::runtime_error("model tree count not a multiple of class count: " + path);
    return model;
}

void write_search_log(const std::string& path, const SearchResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "trial,learning_rate,n_stages,max_depth,min_samples_leaf,subsample,seed,"
           "mean_cv_accuracy\n";
    for (std::size_t t = 0; t < result.trials.size(); ++t) {
        const auto& trial = result.trials[t];
        out << t << ',' << format_double(trial.config.learning_rate) << ','
            << trial.config.n_stages << ',' << trial.config.max_depth << ','
            << trial.config.min_samples_leaf << ',' << format_double(trial.config.subsample)
            << ',' << trial.config.seed << ',' << format_double(trial.mean_cv_accuracy) << '\n';
    }
}

}  // namespace fearlab
