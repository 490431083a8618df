#include "fearlab/signals.hpp"

#include "fearlab/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fearlab {

Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon: " + path);
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto tab = t.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                     ": expected word<TAB>valence");
        std::string word = trim(t.substr(0, tab));
        auto valence = parse_double(t.substr(tab + 1));
        if (word.empty() || !valence)
            throw std::runtime_error(path + " line " + std::to_string(line_no) + ": bad entry");
        if (*valence < -4.0 || *valence > 4.0)
            throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                     ": valence outside [-4, 4]");
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        lex.entries[word] = *valence;
    }
    return lex;
}

void write_lexicon(const std::string& path, const Lexicon& lexicon) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    std::vector<std::pair<std::string, double>> sorted(lexicon.entries.begin(),
                                                       lexicon.entries.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [word, valence] : sorted)
        out << word << '\t' << format_double(valence) << '\n';
}

double compound_score(std::string_view text, const Lexicon& lexicon) {
    if (lexicon.alpha <= 0.0) throw std::invalid_argument("lexicon alpha must be positive");
    double s = 0.0;
    std::size_t i = 0;
    std::string token;
    while (i <= text.size()) {
        char c = i < text.size() ? text[i] : ' ';
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!token.empty()) {
            auto it = lexicon.entries.find(token);
            if (it != lexicon.entries.end()) s += it->second;
            token.clear();
        }
        ++i;
    }
    if (s == 0.0) return 0.0;
    return s / std::sqrt(s * s + lexicon.alpha);
}

TweetSeries aggregate_tweets(const std::vector<TweetRecord>& tweets, const Lexicon& lexicon,
                             const TimeGrid& grid) {
    TweetSeries out;
    out.volume.start = out.sentiment.start = grid.start;
    out.volume.interval = out.sentiment.interval = grid.interval;
    out.volume.values.assign(grid.count, 0.0);
    out.sentiment.values.assign(grid.count, UniformSeries::gap());

    std::vector<double> sums(grid.count, 0.0);
    std::vector<std::size_t> counts(grid.count, 0);
    for (const auto& t : tweets) {
        auto bucket = grid.bucket(t.timestamp);
        if (!bucket) continue;
        double score = t.compound ? *t.compound : compound_score(t.text, lexicon);
        sums[*bucket] += score;
        ++counts[*bucket];
    }
    for (std::size_t i = 0; i < grid.count; ++i) {
        out.volume.values[i] = static_cast<double>(counts[i]);
        if (counts[i] > 0)
            out.sentiment.values[i] = sums[i] / static_cast<double>(counts[i]);
    }
    return out;
}

UniformSeries ewma(const UniformSeries& series, int span) {
    if (span < 1) throw std::invalid_argument("ewma: span must be >= 1");
    const double alpha = 2.0 / (static_cast<double>(span) + 1.0);

    UniformSeries out;
    out.start = series.start;
    out.interval = series.interval;
    out.values.assign(series.size(), UniformSeries::gap());

    bool seeded = false;
    double smoothed = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        double v = series.values[i];
        if (UniformSeries::is_gap(v)) {
            if (seeded) out.values[i] = smoothed;  // leading gaps stay gaps
            continue;
        }
        if (!seeded) {
            smoothed = v;
            seeded = true;
        } else {
            smoothed = alpha * v + (1.0 - alpha) * smoothed;
        }
        out.values[i] = smoothed;
    }
    return out;
}

UniformSeries upsample_linear(const std::vector<TrendsRecord>& hourly, const TimeGrid& grid) {
    if (hourly.size() < 2) throw std::invalid_argument("upsample_linear: need at least 2 knots");
    for (std::size_t i = 1; i < hourly.size(); ++i) {
        if (hourly[i].timestamp <= hourly[i - 1].timestamp)
            throw std::invalid_argument("upsample_linear: knots must be strictly increasing");
    }

    UniformSeries out;
    out.start = grid.start;
    out.interval = grid.interval;
    out.values.assign(grid.count, UniformSeries::gap());

    std::size_t k = 0;  // knot cursor, both sequences advance monotonically
    for (std::size_t i = 0; i < grid.count; ++i) {
        const UtcSeconds t = grid.at(i);
        if (t < hourly.front().timestamp || t > hourly.back().timestamp) continue;
        while (k + 1 < hourly.size() && hourly[k + 1].timestamp < t) ++k;
        const auto& lo = hourly[k];
        const auto& hi = hourly[std::min(k + 1, hourly.size() - 1)];
        if (t == lo.timestamp) {
            out.values[i] = lo.value;
        } else if (t == hi.timestamp) {
            out.values[i] = hi.value;
        } else {
            double frac = static_cast<double>(t - lo.timestamp) /
                          static_cast<double>(hi.timestamp - lo.timestamp);
            out.values[i] = lo.value + frac * (hi.value - lo.value);
        }
    }
    return out;
}

UniformSeries align_to_grid(const std::vector<std::pair<UtcSeconds, double>>& points,
                            const TimeGrid& grid) {
    UniformSeries out;
    out.start = grid.start;
    out.interval = grid.interval;
    out.values.assign(grid.count, UniformSeries::gap());

    std::vector<std::pair<UtcSeconds, double>> sorted = points;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t j = 0;
    bool have = false;
    double latest = 0.0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const UtcSeconds t = grid.at(i);
        while (j < sorted.size() && sorted[j].first <= t) {
            latest = sorted[j].second;
            have = true;
            ++j;
        }
        if (have) out.values[i] = latest;
    }
    return out;
}

}  // namespace fearlab
