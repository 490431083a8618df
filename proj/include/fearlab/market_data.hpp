#pragma once

#include "fearlab/time_utils.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fearlab {

enum class OptionSide { Call, Put };

struct OptionQuoteRecord {
    UtcSeconds timestamp = 0;
    UtcSeconds expiry = 0;
    double strike = 0.0;
    OptionSide side = OptionSide::Call;
    double bid = 0.0;
    double ask = 0.0;
};

struct TweetRecord {
    UtcSeconds timestamp = 0;
    std::string text;
    bool is_retweet = false;
    // Pre-computed compound score carried in the input file; bypasses the
    // internal scorer when present.
    std::optional<double> compound;
};

struct TrendsRecord {
    UtcSeconds timestamp = 0;  // hourly
    double value = 0.0;        // [0, 100], relative search interest
};

// Every input row lands in exactly one bucket: accepted or a counted
// rejection with a reason. Nothing is dropped silently.
struct ParseReport {
    std::size_t total_rows = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t filtered_retweets = 0;  // tweets only
    std::size_t gaps = 0;               // trends only: missing hourly steps
    std::vector<std::string> rejection_samples;  // first few, for diagnostics

    void note_rejection(const std::string& why);
};

enum class QuoteFormat { Csv, Jsonl };

struct QuoteParseResult {
    std::vector<OptionQuoteRecord> records;  // sorted by timestamp
    ParseReport report;
};

struct TweetParseResult {
    std::vector<TweetRecord> records;  // retweets removed, sorted by timestamp
    ParseReport report;
};

struct TrendsParseResult {
    std::vector<TrendsRecord> records;  // strictly increasing timestamps
    ParseReport report;
};

// Throws on unreadable files, header mismatch, or when more than 10% of
// quote rows are rejected.
QuoteParseResult parse_quotes(const std::string& path, QuoteFormat format);
TweetParseResult parse_tweets(const std::string& path);
TrendsParseResult parse_trends(const std::string& path);

void write_quotes(const std::string& path, const std::vector<OptionQuoteRecord>& records,
                  QuoteFormat format);
void write_tweets(const std::string& path, const std::vector<TweetRecord>& records);
void write_trends(const std::string& path, const std::vector<TrendsRecord>& records);

// True when the text contains "RT" as a standalone token (case-sensitive,
// delimited by whitespace/punctuation). "shoRTage" does not count.
bool contains_rt_token(std::string_view text);

}  // namespace fearlab
