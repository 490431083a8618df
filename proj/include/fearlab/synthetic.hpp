#pragma once

#include "fearlab/dataset.hpp"
#include "fearlab/gbm.hpp"
#include "fearlab/labeling.hpp"
#include "fearlab/market_data.hpp"
#include "fearlab/series.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

// Deterministic generators for test data and the bundled demo fixture. The
// production pipeline never calls into this namespace.
namespace fearlab::synth {

double norm_cdf(double x);
double bs_call(double spot, double strike, double years, double vol, double rate);
double bs_put(double spot, double strike, double years, double vol, double rate);

// First Friday 08:00 UTC strictly after t.
UtcSeconds next_friday_0800(UtcSeconds t);

struct QuoteStreamParams {
    UtcSeconds start = 0;
    UtcSeconds end = 0;  // exclusive
    std::int64_t refresh_seconds = 900;
    double spot = 30000.0;
    double vol = 0.6;  // flat implied volatility, annualised
    double rate = 0.0;
    double strike_lo_frac = 0.3;    // strike grid as fractions of spot
    double strike_hi_frac = 3.0;
    double strike_step_frac = 0.025;
    double half_spread_frac = 0.002;  // half bid-ask spread relative to mid
    int expiries = 3;                 // upcoming Fridays quoted per refresh
};

// Black-Scholes quotes at one flat volatility, refreshed on a fixed cadence.
// Sorted by timestamp.
std::vector<OptionQuoteRecord> flat_vol_quotes(const QuoteStreamParams& params);

struct TweetStreamParams {
    UtcSeconds start = 0;
    UtcSeconds end = 0;  // exclusive
    double tweets_per_minute = 2.0;
    double retweet_fraction = 0.2;
    std::uint64_t seed = 0;
};

// Tweets with word counts 5-12 drawn from `vocabulary`; retweet texts are
// prefixed with the "RT" marker token as well as flagged.
std::vector<TweetRecord> random_tweets(const TweetStreamParams& params,
                                       const std::vector<std::string>& vocabulary);

// Hourly reflected random walk inside [0, 100].
std::vector<TrendsRecord> random_trends(UtcSeconds start, UtcSeconds end, std::uint64_t seed);

// Five-minute geometric random walk around `level`.
UniformSeries random_price_series(UtcSeconds start, UtcSeconds end, double level,
                                  double step_vol, std::uint64_t seed);

struct PlantedParams {
    std::size_t length = 3000;  // direction slots per series
    UtcSeconds start = 0;
    std::int64_t interval_seconds = 300;
    std::uint64_t seed = 0;
    bool include_constant = false;  // append an all-flat series
};

// Named direction series where "vxbt" copies "trends" four steps back, so a
// one-step-ahead target on "vxbt" equals the (trends, lag 3) feature. All
// other series are independent uniform noise over {-1, 0, +1}.
std::vector<std::pair<std::string, DirectionSeries>> planted_lag3_directions(
    const PlantedParams& params);

// Independent uniform direction noise for every given name; no structure.
std::vector<std::pair<std::string, DirectionSeries>> random_directions(
    const std::vector<std::string>& names, std::size_t length, UtcSeconds start,
    std::int64_t interval_seconds, std::uint64_t seed);

struct BlobParams {
    std::size_t samples_per_class = 1000;
    std::size_t dims = 4;
    double separation = 4.0;  // distance scale between class centres
    double noise = 1.0;       // isotropic standard deviation
    std::uint64_t seed = 0;
};

// Three Gaussian blobs labelled {-1, 0, +1}, classes interleaved in time so
// chronological folds stay balanced.
LabeledDataset gaussian_blobs(const BlobParams& params);

}  // namespace fearlab::synth
