#pragma once

#include "fearlab/market_data.hpp"
#include "fearlab/series.hpp"

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fearlab {

// Word valences in [-4, 4] plus the compound-score normalization constant.
struct Lexicon {
    std::unordered_map<std::string, double> entries;
    double alpha = 15.0;
};

// Text lines `word<TAB>valence`; '#'-prefixed lines are comments.
Lexicon load_lexicon(const std::string& path);
void write_lexicon(const std::string& path, const Lexicon& lexicon);

// Sum of matched lowercased token valences s, normalised to s/sqrt(s^2+alpha).
// Bounded in (-1, 1); 0 when nothing matches.
double compound_score(std::string_view text, const Lexicon& lexicon);

struct TweetSeries {
    UniformSeries volume;     // tweets per bucket, never a gap
    UniformSeries sentiment;  // mean compound per bucket, gap when empty
};

// Buckets tweets onto the grid. A record's own compound score, when present,
// bypasses the lexicon scorer.
TweetSeries aggregate_tweets(const std::vector<TweetRecord>& tweets, const Lexicon& lexicon,
                             const TimeGrid& grid);

// Causal EWMA, newest-observation weight 2/(span+1). Output at t depends only
// on inputs at or before t; gaps carry the previous smoothed value forward.
UniformSeries ewma(const UniformSeries& series, int span = 12);

// Hourly knots to the 5-minute grid: exact at knots, linear between them,
// gap outside the knot range. Throws with fewer than two knots.
UniformSeries upsample_linear(const std::vector<TrendsRecord>& hourly, const TimeGrid& grid);

// Latest value at or before each grid instant (forward alignment) for series
// already sampled at or finer than the grid, e.g. the index price input.
UniformSeries align_to_grid(const std::vector<std::pair<UtcSeconds, double>>& points,
                            const TimeGrid& grid);

}  // namespace fearlab
