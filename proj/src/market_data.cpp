#include "fearlab/market_data.hpp"

#include "fearlab/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace fearlab {

namespace {

constexpr std::size_t kMaxRejectionSamples = 8;
constexpr double kMaxRejectedFraction = 0.10;

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::optional<OptionSide> parse_side(std::string_view raw) {
    std::string s = trim(raw);
    if (s == "C" || s == "c" || s == "call" || s == "CALL") return OptionSide::Call;
    if (s == "P" || s == "p" || s == "put" || s == "PUT") return OptionSide::Put;
    return std::nullopt;
}

// Invariant checks shared by both quote formats. Returns a reason on failure.
std::optional<std::string> validate_quote(const OptionQuoteRecord& q) {
    if (q.strike <= 0.0) return "strike must be positive";
    if (q.bid < 0.0 || q.ask < 0.0) return "negative bid/ask";
    if (q.ask < q.bid) return "ask below bid";
    if (q.expiry <= q.timestamp) return "expiry not after timestamp";
    return std::nullopt;
}

std::optional<OptionQuoteRecord> quote_from_fields(const std::vector<std::string>& fields,
                                                   std::string& why) {
    if (fields.size() != 6) {
        why = "expected 6 fields";
        return std::nullopt;
    }
    OptionQuoteRecord q;
    auto ts = parse_iso8601(fields[0]);
    auto exp = parse_iso8601(fields[1]);
    auto strike = parse_double(fields[2]);
    auto side = parse_side(fields[3]);
    auto bid = parse_double(fields[4]);
    auto ask = parse_double(fields[5]);
    if (!ts || !exp || !strike || !side || !bid || !ask) {
        why = "unparseable field";
        return std::nullopt;
    }
    q.timestamp = *ts;
    q.expiry = *exp;
    q.strike = *strike;
    q.side = *side;
    q.bid = *bid;
    q.ask = *ask;
    if (auto reason = validate_quote(q)) {
        why = *reason;
        return std::nullopt;
    }
    return q;
}

std::optional<OptionQuoteRecord> quote_from_json(const nlohmann::json& obj, std::string& why) {
    if (!obj.is_object()) {
        why = "not a JSON object";
        return std::nullopt;
    }
    std::vector<std::string> fields(6);
    try {
        fields[0] = obj.at("timestamp").get<std::string>();
        fields[1] = obj.at("expiry").get<std::string>();
        fields[2] = format_double(obj.at("strike").get<double>());
        fields[3] = obj.at("side").get<std::string>();
        fields[4] = format_double(obj.at("bid").get<double>());
        fields[5] = format_double(obj.at("ask").get<double>());
    } catch (const nlohmann::json::exception&) {
        why = "missing or mistyped field";
        return std::nullopt;
    }
    return quote_from_fields(fields, why);
}

void enforce_rejection_budget(const ParseReport& report, const std::string& path) {
    if (report.total_rows == 0) return;
    double fraction =
        static_cast<double>(report.rejected) / static_cast<double>(report.total_rows);
    if (fraction > kMaxRejectedFraction) {
        std::string detail;
        for (const auto& s : report.rejection_samples) detail += "\n  " + s;
        throw std::runtime_error(path + ": " + std::to_string(report.rejected) + " of " +
                                 std::to_string(report.total_rows) +
                                 " rows rejected (>10%), refusing to continue" + detail);
    }
}

}  // namespace

void ParseReport::note_rejection(const std::string& why) {
    ++rejected;
    if (rejection_samples.size() < kMaxRejectionSamples) rejection_samples.push_back(why);
}

bool contains_rt_token(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_char(text[j])) ++j;
        if (j - i == 2 && text[i] == 'R' && text[i + 1] == 'T') return true;
        i = j;
    }
    return false;
}

QuoteParseResult parse_quotes(const std::string& path, QuoteFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open quotes file: " + path);

    QuoteParseResult result;
    std::string line;

    if (format == QuoteFormat::Csv) {
        if (!std::getline(in, line)) throw std::runtime_error("empty quotes file: " + path);
        auto header = split_csv_line(trim(line));
        const std::vector<std::string> expected = {"timestamp", "expiry", "strike",
                                                   "side",      "bid",    "ask"};
        std::vector<std::string> got;
        for (auto& h : header) got.push_back(trim(h));
        if (got != expected)
            throw std::runtime_error("unknown quotes schema in " + path + " (header: " +
                                     trim(line) + ")");
    }

    std::size_t line_no = format == QuoteFormat::Csv ? 1 : 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++result.report.total_rows;
        std::string why;
        std::optional<OptionQuoteRecord> q;
        if (format == QuoteFormat::Csv) {
            q = quote_from_fields(split_csv_line(line), why);
        } else {
            auto obj = nlohmann::json::parse(line, nullptr, false);
            if (obj.is_discarded()) {
                why = "invalid JSON";
            } else {
                q = quote_from_json(obj, why);
            }
        }
        if (q) {
            result.records.push_back(*q);
            ++result.report.accepted;
        } else {
            result.report.note_rejection("line " + std::to_string(line_no) + ": " + why);
        }
    }

    enforce_rejection_budget(result.report, path);
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const OptionQuoteRecord& a, const OptionQuoteRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return result;
}

TweetParseResult parse_tweets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tweets file: " + path);

    TweetParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++result.report.total_rows;
        auto obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            result.report.note_rejection("line " + std::to_string(line_no) + ": invalid JSON");
            continue;
        }
        TweetRecord t;
        if (!obj.contains("timestamp") || !obj["timestamp"].is_string()) {
            result.report.note_rejection("line " + std::to_string(line_no) +
                                         ": missing timestamp field");
            continue;
        }
        auto ts = parse_iso8601(obj["timestamp"].get<std::string>());
        if (!ts) {
            result.report.note_rejection("line " + std::to_string(line_no) + ": bad timestamp");
            continue;
        }
        t.timestamp = *ts;
        t.text = obj.value("text", std::string{});
        if (trim(t.text).empty()) {
            result.report.note_rejection("line " + std::to_string(line_no) + ": empty text");
            continue;
        }
        t.is_retweet = obj.value("is_retweet", false);
        if (obj.contains("compound") && obj["compound"].is_number())
            t.compound = obj["compound"].get<double>();

        if (t.is_retweet || contains_rt_token(t.text)) {
            ++result.report.filtered_retweets;
            ++result.report.accepted;  // valid row, deliberately excluded
            continue;
        }
        result.records.push_back(std::move(t));
        ++result.report.accepted;
    }

    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const TweetRecord& a, const TweetRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return result;
}

TrendsParseResult parse_trends(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trends file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trends file: " + path);
    auto header = split_csv_line(trim(line));
    if (header.size() != 2 || trim(header[0]) != "timestamp" || trim(header[1]) != "value")
        throw std::runtime_error("unknown trends schema in " + path);

    TrendsParseResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++result.report.total_rows;
        auto fields = split_csv_line(line);
        std::optional<UtcSeconds> ts;
        std::optional<double> value;
        if (fields.size() == 2) {
            ts = parse_iso8601(fields[0]);
            value = parse_double(fields[1]);
        }
        if (!ts || !value) {
            result.report.note_rejection("line " + std::to_string(line_no) + ": unparseable row");
            continue;
        }
        if (*value < 0.0 || *value > 100.0) {
            result.report.note_rejection("line " + std::to_string(line_no) +
                                         ": value outside [0,100]");
            continue;
        }
        if (!result.records.empty() && *ts <= result.records.back().timestamp) {
            result.report.note_rejection("line " + std::to_string(line_no) +
                                         ": duplicate or out-of-order timestamp");
            continue;
        }
        if (!result.records.empty()) {
            std::int64_t gap_hours = (*ts - result.records.back().timestamp) / kSecondsPerHour - 1;
            if (gap_hours > 0) result.report.gaps += static_cast<std::size_t>(gap_hours);
        }
        result.records.push_back({*ts, *value});
        ++result.report.accepted;
    }
    return result;
}

void write_quotes(const std::string& path, const std::vector<OptionQuoteRecord>& records,
                  QuoteFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    if (format == QuoteFormat::Csv) {
        out << "timestamp,expiry,strike,side,bid,ask\n";
        for (const auto& q : records) {
            out << format_iso8601(q.timestamp) << ',' << format_iso8601(q.expiry) << ','
                << format_double(q.strike) << ',' << (q.side == OptionSide::Call ? 'C' : 'P')
                << ',' << format_double(q.bid) << ',' << format_double(q.ask) << '\n';
        }
    } else {
        for (const auto& q : records) {
            nlohmann::json obj;
            obj["timestamp"] = format_iso8601(q.timestamp);
            obj["expiry"] = format_iso8601(q.expiry);
            obj["strike"] = q.strike;
            obj["side"] = q.side == OptionSide::Call ? "C" : "P";
            obj["bid"] = q.bid;
            obj["ask"] = q.ask;
            out << obj.dump() << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_tweets(const std::string& path, const std::vector<TweetRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& t : records) {
        nlohmann::json obj;
        obj["timestamp"] = format_iso8601(t.timestamp);
        obj["text"] = t.text;
        obj["is_retweet"] = t.is_retweet;
        if (t.compound) obj["compound"] = *t.compound;
        out << obj.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_trends(const std::string& path, const std::vector<TrendsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "timestamp,value\n";
    for (const auto& r : records)
        out << format_iso8601(r.timestamp) << ',' << format_double(r.value) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fearlab
