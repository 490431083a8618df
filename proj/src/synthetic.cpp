#include "fearlab/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fearlab::synth {

namespace {

constexpr double kYearMinutes = 525600.0;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bs_call(double spot, double strike, double years, double vol, double rate) {
    if (years <= 0.0) return std::max(spot - strike, 0.0);
    double sd = vol * std::sqrt(years);
    double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * years) / sd;
    double d2 = d1 - sd;
    return spot * norm_cdf(d1) - strike * std::exp(-rate * years) * norm_cdf(d2);
}

double bs_put(double spot, double strike, double years, double vol, double rate) {
    if (years <= 0.0) return std::max(strike - spot, 0.0);
    double sd = vol * std::sqrt(years);
    double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * years) / sd;
    double d2 = d1 - sd;
    return strike * std::exp(-rate * years) * norm_cdf(-d2) - spot * norm_cdf(-d1);
}

UtcSeconds next_friday_0800(UtcSeconds t) {
    const std::int64_t day = floor_div(t, kSecondsPerDay);
    for (int d = 0; d < 8; ++d) {
        UtcSeconds candidate = (day + d) * kSecondsPerDay + 8 * kSecondsPerHour;
        if (candidate > t && weekday_utc(candidate) == 5) return candidate;
    }
    throw std::logic_error("next_friday_0800: no Friday within eight days");
}

std::vector<OptionQuoteRecord> flat_vol_quotes(const QuoteStreamParams& params) {
    if (params.end <= params.start)
        throw std::invalid_argument("flat_vol_quotes: empty time range");
    if (params.refresh_seconds <= 0)
        throw std::invalid_argument("flat_vol_quotes: refresh cadence must be positive");

    std::vector<OptionQuoteRecord> records;
    for (UtcSeconds t = params.start; t < params.end; t += params.refresh_seconds) {
        std::vector<UtcSeconds> fridays;
        UtcSeconds f = next_friday_0800(t);
        for (int i = 0; i < params.expiries; ++i) {
            fridays.push_back(f);
            f = next_friday_0800(f);
        }

        for (UtcSeconds expiry : fridays) {
            double minutes = static_cast<double>(expiry - t) / 60.0;
            double years = minutes / kYearMinutes;
            for (double frac = params.strike_lo_frac; frac <= params.strike_hi_frac + 1e-12;
                 frac += params.strike_step_frac) {
                double strike = frac * params.spot;
                double call_mid = bs_call(params.spot, strike, years, params.vol, params.rate);
                double put_mid = bs_put(params.spot, strike, years, params.vol, params.rate);
                auto push = [&](OptionSide side, double mid) {
                    OptionQuoteRecord q;
                    q.timestamp = t;
                    q.expiry = expiry;
                    q.strike = strike;
                    q.side = side;
                    q.bid = mid * (1.0 - params.half_spread_frac);
                    q.ask = mid * (1.0 + params.half_spread_frac);
                    records.push_back(q);
                };
                push(OptionSide::Call, call_mid);
                push(OptionSide::Put, put_mid);
            }
        }
    }
    return records;
}

std::vector<TweetRecord> random_tweets(const TweetStreamParams& params,
                                       const std::vector<std::string>& vocabulary) {
    if (params.end <= params.start)
        throw std::invalid_argument("random_tweets: empty time range");
    if (vocabulary.empty()) throw std::invalid_argument("random_tweets: empty vocabulary");

    std::mt19937_64 rng(params.seed);
    std::poisson_distribution<int> arrivals(params.tweets_per_minute * 5.0);
    std::uniform_int_distribution<std::int64_t> offset(0, kFiveMinutes - 1);
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary.size() - 1);
    std::uniform_int_distribution<int> words(5, 12);
    std::bernoulli_distribution retweet(params.retweet_fraction);

    std::vector<TweetRecord> tweets;
    for (UtcSeconds bucket = params.start; bucket < params.end; bucket += kFiveMinutes) {
        int count = arrivals(rng);
        for (int i = 0; i < count; ++i) {
            TweetRecord tw;
            tw.timestamp = bucket + offset(rng);
            tw.is_retweet = retweet(rng);
            std::string text = tw.is_retweet ? "RT" : vocabulary[pick(rng)];
            int extra = words(rng);
            for (int w = 0; w < extra; ++w) text += " " + vocabulary[pick(rng)];
            tw.text = std::move(text);
            tweets.push_back(std::move(tw));
        }
    }
    std::stable_sort(tweets.begin(), tweets.end(),
                     [](const TweetRecord& a, const TweetRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return tweets;
}

std::vector<TrendsRecord> random_trends(UtcSeconds start, UtcSeconds end, std::uint64_t seed) {
    if (end <= start) throw std::invalid_argument("random_trends: empty time range");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 4.0);
    std::uniform_real_distribution<double> init(20.0, 80.0);

    std::vector<TrendsRecord> rows;
    double level = init(rng);
    for (UtcSeconds t = start; t < end; t += kSecondsPerHour) {
        level += step(rng);
        if (level < 0.0) level = -level;
        if (level > 100.0) level = 200.0 - level;
        rows.push_back({t, level});
    }
    return rows;
}

UniformSeries random_price_series(UtcSeconds start, UtcSeconds end, double level,
                                  double step_vol, std::uint64_t seed) {
    if (end <= start) throw std::invalid_argument("random_price_series: empty time range");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> shock(0.0, step_vol);

    UniformSeries series;
    series.start = start;
    series.interval = kFiveMinutes;
    double price = level;
    for (UtcSeconds t = start; t < end; t += kFiveMinutes) {
        price *= std::exp(shock(rng));
        series.values.push_back(price);
    }
    return series;
}

namespace {

DirectionSeries uniform_direction_noise(std::size_t length, UtcSeconds start,
                                        std::int64_t interval, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> tri(-1, 1);
    DirectionSeries dir;
    dir.start = start;
    dir.interval = interval;
    dir.labels.resize(length);
    for (auto& v : dir.labels) v = static_cast<std::int8_t>(tri(rng));
    return dir;
}

}  // namespace

std::vector<std::pair<std::string, DirectionSeries>> planted_lag3_directions(
    const PlantedParams& params) {
    if (params.length < 8) throw std::invalid_argument("planted_lag3_directions: too short");
    std::mt19937_64 rng(params.seed);

    DirectionSeries trends =
        uniform_direction_noise(params.length, params.start, params.interval_seconds, rng);
    DirectionSeries vxbt =
        uniform_direction_noise(params.length, params.start, params.interval_seconds, rng);
    for (std::size_t t = 4; t < params.length; ++t) vxbt.labels[t] = trends.labels[t - 4];

    std::vector<std::pair<std::string, DirectionSeries>> out;
    out.emplace_back("vxbt", std::move(vxbt));
    out.emplace_back("index",
                     uniform_direction_noise(params.length, params.start,
                                             params.interval_seconds, rng));
    out.emplace_back("tweet_volume",
                     uniform_direction_noise(params.length, params.start,
                                             params.interval_seconds, rng));
    out.emplace_back("tweet_sentiment",
                     uniform_direction_noise(params.length, params.start,
                                             params.interval_seconds, rng));
    out.emplace_back("trends", std::move(trends));
    if (params.include_constant) {
        DirectionSeries steady;
        steady.start = params.start;
        steady.interval = params.interval_seconds;
        steady.labels.assign(params.length, 0);
        out.emplace_back("steady", std::move(steady));
    }
    return out;
}

std::vector<std::pair<std::string, DirectionSeries>> random_directions(
    const std::vector<std::string>& names, std::size_t length, UtcSeconds start,
    std::int64_t interval_seconds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::string, DirectionSeries>> out;
    for (const std::string& name : names)
        out.emplace_back(name, uniform_direction_noise(length, start, interval_seconds, rng));
    return out;
}

LabeledDataset gaussian_blobs(const BlobParams& params) {
    if (params.dims < 2 || params.samples_per_class < 1)
        throw std::invalid_argument("gaussian_blobs: degenerate shape");
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> noise(0.0, params.noise);

    // Pairwise centre distances are at least separation * sqrt(2).
    std::vector<std::vector<double>> centres(kNumClasses,
                                             std::vector<double>(params.dims, 0.0));
    centres[0][0] = params.separation;
    centres[1][1] = params.separation;
    centres[2][0] = -params.separation;
    centres[2][1] = -params.separation;

    LabeledDataset ds;
    for (std::size_t d = 0; d < params.dims; ++d)
        ds.feature_names.push_back({"blob_dim" + std::to_string(d), static_cast<int>(d)});

    const std::size_t total = params.samples_per_class * kNumClasses;
    ds.features.reserve(total * params.dims);
    for (std::size_t i = 0; i < total; ++i) {
        int c = static_cast<int>(i % kNumClasses);
        for (std::size_t d = 0; d < params.dims; ++d)
            ds.features.push_back(centres[c][d] + noise(rng));
        ds.targets.push_back(static_cast<std::int8_t>(class_label(c)));
        ds.timestamps.push_back(static_cast<UtcSeconds>(i) * kFiveMinutes);
    }
    return ds;
}

}  // namespace fearlab::synth
