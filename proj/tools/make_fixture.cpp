// Generates the bundled synthetic demo bundle: ten days of option quotes,
// tweets, search trends and an index-price walk, plus a ready-to-run config.
#include "fearlab/market_data.hpp"
#include "fearlab/series.hpp"
#include "fearlab/signals.hpp"
#include "fearlab/synthetic.hpp"
#include "fearlab/time_utils.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fearlab;

namespace {

Lexicon demo_lexicon() {
    Lexicon lex;
    lex.entries = {
        {"good", 1.9},    {"great", 3.1},   {"bad", -2.5},     {"terrible", -3.4},
        {"moon", 2.0},    {"crash", -3.0},  {"fear", -2.2},    {"bullish", 2.7},
        {"bearish", -2.4}, {"pump", 1.5},   {"dump", -1.8},    {"hodl", 1.2},
        {"rekt", -2.9},   {"profit", 2.3},  {"loss", -2.1},    {"scam", -3.2},
        {"rally", 2.0},   {"panic", -2.8},  {"surge", 1.8},    {"plunge", -2.6},
    };
    return lex;
}

std::vector<std::string> demo_vocabulary(const Lexicon& lex) {
    std::vector<std::string> words{"the",    "price",  "market",     "bitcoin", "today",
                                   "chart",  "buy",    "sell",       "volume",  "trend",
                                   "news",   "update", "watch",      "level",   "support",
                                   "resistance"};
    for (const auto& [word, valence] : lex.entries) words.push_back(word);
    std::sort(words.begin(), words.end());
    return words;
}

// Piecewise-flat volatility: a new level every six hours from a seeded walk,
// so the index series actually moves.
std::vector<OptionQuoteRecord> segmented_quotes(UtcSeconds start, UtcSeconds end,
                                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> shock(0.0, 0.05);
    double vol = 0.6;

    std::vector<OptionQuoteRecord> all;
    constexpr std::int64_t kSegment = 6 * kSecondsPerHour;
    for (UtcSeconds t = start; t < end; t += kSegment) {
        synth::QuoteStreamParams params;
        params.start = t;
        params.end = std::min<UtcSeconds>(t + kSegment, end);
        params.refresh_seconds = 900;
        params.spot = 30000.0;
        params.vol = vol;
        params.strike_lo_frac = 0.4;
        params.strike_hi_frac = 2.5;
        params.strike_step_frac = 0.075;
        params.expiries = 3;
        auto segment = synth::flat_vol_quotes(params);
        all.insert(all.end(), segment.begin(), segment.end());

        vol = std::clamp(vol + shock(rng), 0.35, 0.95);
    }
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Write a deterministic synthetic input bundle and run config"};

    std::string out_dir;
    std::uint64_t seed = 20260105;
    int days = 10;
    app.add_option("--out", out_dir, "Directory for the bundle")->required();
    app.add_option("--seed", seed, "Generator seed");
    app.add_option("--days", days, "Grid span in days")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);
        const UtcSeconds start = parse_iso8601("2026-01-05T00:00:00Z").value();
        const UtcSeconds end = start + static_cast<std::int64_t>(days) * kSecondsPerDay;

        // One hour of quote warm-up so the first grid instants have fresh books.
        auto quotes = segmented_quotes(start - kSecondsPerHour, end, seed);
        write_quotes((fs::path(out_dir) / "quotes.csv").string(), quotes, QuoteFormat::Csv);

        Lexicon lexicon = demo_lexicon();
        write_lexicon((fs::path(out_dir) / "lexicon.tsv").string(), lexicon);

        synth::TweetStreamParams tweet_params;
        tweet_params.start = start;
        tweet_params.end = end + kFiveMinutes;
        tweet_params.tweets_per_minute = 1.5;
        tweet_params.retweet_fraction = 0.2;
        tweet_params.seed = seed + 1;
        auto tweets = synth::random_tweets(tweet_params, demo_vocabulary(lexicon));
        write_tweets((fs::path(out_dir) / "tweets.jsonl").string(), tweets);

        // Trends knots overhang the grid so interpolation never runs off the end.
        auto trends = synth::random_trends(start - 2 * kSecondsPerHour,
                                           end + 2 * kSecondsPerHour, seed + 2);
        write_trends((fs::path(out_dir) / "trends.csv").string(), trends);

        auto index = synth::random_price_series(start, end + kFiveMinutes, 30000.0, 0.002,
                                                seed + 3);
        write_series_csv((fs::path(out_dir) / "index.csv").string(), index);

        nlohmann::json config{
            {"seed", seed},
            {"out_dir", (fs::path(out_dir) / "out").string()},
            {"inputs",
             {{"quotes", (fs::path(out_dir) / "quotes.csv").string()},
              {"tweets", (fs::path(out_dir) / "tweets.jsonl").string()},
              {"trends", (fs::path(out_dir) / "trends.csv").string()},
              {"index", (fs::path(out_dir) / "index.csv").string()},
              {"lexicon", (fs::path(out_dir) / "lexicon.tsv").string()}}},
            {"grid",
             {{"start", format_iso8601(start)},
              {"end", format_iso8601(end)},
              {"interval_seconds", 300}}},
            {"signals", {{"ewma_span", 12}}},
            {"labeling", {{"mode", "leak-safe"}}},
            {"dataset", {{"window", 24}, {"horizon", 1}, {"target", "vxbt"}}},
            {"split", {{"train_fraction", 0.9}}},
            {"train",
             {{"tune", true},
              {"random_trials", 3},
              {"grid_refine", true},
              {"space",
               {{"learning_rate", {0.05, 0.3}},
                {"n_stages", {20, 50}},
                {"max_depth", {2, 3}},
                {"folds", 3}}}}},
            {"importance", {{"repeats", 5}}},
            {"sweep", {{"windows", {1, 2, 4, 8, 12, 24}}, {"folds", 3}}}};

        std::ofstream config_out(fs::path(out_dir) / "config.json");
        if (!config_out) throw std::runtime_error("cannot write config.json");
        config_out << config.dump(2) << '\n';

        std::cout << "bundle written to " << out_dir << " (" << quotes.size() << " quotes, "
                  << tweets.size() << " tweets)\n";
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
