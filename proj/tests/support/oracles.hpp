// Independent reference implementations used to cross-check the library.
// Everything here is written from the governing formulas directly, in a
// different shape than the production code, so agreement is meaningful.
#pragma once

#include "fearlab/labeling.hpp"
#include "fearlab/series.hpp"
#include "fearlab/volindex.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

namespace oracles {

// Straight-line evaluation of the single-expiry variance formula:
//   sigma^2 = (2/T) sum_i dK_i/K_i^2 e^{RT} Q(K_i)  -  (1/T) (F/K0 - 1)^2
// over already-chosen out-of-the-money midpoints.
struct VariancePoint {
    double strike;
    double mid;
};

inline double variance_formula(const std::vector<VariancePoint>& points, double years,
                               double rate, double forward, double k0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double dk;
        if (points.size() == 1)
            dk = points[i].strike;
        else if (i == 0)
            dk = points[1].strike - points[0].strike;
        else if (i + 1 == points.size())
            dk = points[i].strike - points[i - 1].strike;
        else
            dk = (points[i + 1].strike - points[i - 1].strike) / 2.0;
        acc += dk / (points[i].strike * points[i].strike) * std::exp(rate * years) *
               points[i].mid;
    }
    double bias = forward / k0 - 1.0;
    return 2.0 / years * acc - bias * bias / years;
}

// Piecewise-linear interpolation by scanning the knot list from scratch.
inline std::optional<double> piecewise_linear(const std::vector<std::pair<double, double>>& knots,
                                              double x) {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double x0 = knots[i].first, x1 = knots[i + 1].first;
        if (x < x0 || x > x1) continue;
        double t = (x - x0) / (x1 - x0);
        return knots[i].second + t * (knots[i + 1].second - knots[i].second);
    }
    return std::nullopt;
}

// One-line relabeling of a dense series at a fixed threshold.
inline std::vector<int> relabel(const std::vector<double>& v, double theta) {
    std::vector<int> labels;
    for (std::size_t t = 1; t < v.size(); ++t) {
        double change = (v[t] - v[t - 1]) / std::max(std::abs(v[t - 1]), 1e-9);
        labels.push_back(change > theta ? 1 : change < -theta ? -1 : 0);
    }
    return labels;
}

struct ThresholdChoice {
    double theta = 0.0;
    std::array<std::size_t, 3> counts{};  // {down, flat, up}
    std::size_t imbalance = 0;
};

// Brute-force scan over every distinct absolute percentage change.
inline ThresholdChoice best_threshold(const std::vector<double>& v) {
    // Candidate set per the labeling contract: every distinct absolute
    // percentage change (a std::set visits them smallest first, so ties keep
    // the smaller theta).
    std::set<double> candidates;
    for (std::size_t t = 1; t < v.size(); ++t)
        candidates.insert(
            std::abs((v[t] - v[t - 1]) / std::max(std::abs(v[t - 1]), 1e-9)));

    ThresholdChoice best;
    bool first = true;
    for (double theta : candidates) {
        auto labels = relabel(v, theta);
        std::array<std::size_t, 3> counts{};
        for (int l : labels) ++counts[static_cast<std::size_t>(l + 1)];
        std::size_t hi = std::max({counts[0], counts[1], counts[2]});
        std::size_t lo = std::min({counts[0], counts[1], counts[2]});
        if (first || hi - lo < best.imbalance) {
            best.theta = theta;
            best.counts = {counts[0], counts[1], counts[2]};
            best.imbalance = hi - lo;
            first = false;
        }
    }
    return best;
}

// Mean multiclass cross-entropy at fixed per-class scores, plus its gradient
// by central finite differences.
inline double mean_cross_entropy(const std::array<double, 3>& scores,
                                 const std::vector<int>& class_indices) {
    double m = std::max({scores[0], scores[1], scores[2]});
    double z = 0.0;
    for (double s : scores) z += std::exp(s - m);
    double total = 0.0;
    for (int c : class_indices) total += -(scores[c] - m - std::log(z));
    return total / static_cast<double>(class_indices.size());
}

inline std::array<double, 3> fd_gradient(const std::array<double, 3>& scores,
                                         const std::vector<int>& class_indices,
                                         double h = 1e-6) {
    std::array<double, 3> grad{};
    for (int c = 0; c < 3; ++c) {
        std::array<double, 3> up = scores, down = scores;
        up[c] += h;
        down[c] -= h;
        grad[c] = (mean_cross_entropy(up, class_indices) -
                   mean_cross_entropy(down, class_indices)) /
                  (2.0 * h);
    }
    return grad;
}

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("fearlab_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Geometric random walk, always positive, suitable for percentage labeling.
inline std::vector<double> geometric_walk(std::size_t n, std::uint64_t seed,
                                          double step_sd = 0.01) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> shock(0.0, step_sd);
    std::vector<double> v(n);
    double level = 100.0;
    for (std::size_t i = 0; i < n; ++i) {
        level *= std::exp(shock(rng));
        v[i] = level;
    }
    return v;
}

}  // namespace oracles
