#include "fearlab/pipeline.hpp"

#include "fearlab/csv.hpp"
#include "fearlab/dataset.hpp"
#include "fearlab/importance.hpp"
#include "fearlab/labeling.hpp"
#include "fearlab/market_data.hpp"
#include "fearlab/signals.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fearlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kStageVersion = 1;

// ---------------------------------------------------------------- config ---

class Violations {
public:
    void add(const std::string& what) { items_.push_back(what); }
    bool empty() const { return items_.empty(); }

    [[noreturn]] void raise() const {
        std::ostringstream msg;
        msg << "config validation failed (" << items_.size() << " problem"
            << (items_.size() == 1 ? "" : "s") << "):";
        for (const std::string& item : items_) msg << "\n  - " << item;
        throw ConfigError(msg.str());
    }

private:
    std::vector<std::string> items_;
};

const json* field(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::optional<UtcSeconds> read_instant(const json& obj, const char* key, const char* where,
                                       Violations& v) {
    const json* j = field(obj, key);
    if (!j) {
        v.add(std::string(where) + "." + key + " is required");
        return std::nullopt;
    }
    if (!j->is_string()) {
        v.add(std::string(where) + "." + key + " must be an ISO-8601 string");
        return std::nullopt;
    }
    std::optional<UtcSeconds> parsed = parse_iso8601(j->get<std::string>());
    if (!parsed)
        v.add(std::string(where) + "." + key + " is not a valid ISO-8601 instant: " +
              j->get<std::string>());
    return parsed;
}

std::string read_path(const json& obj, const char* key, const char* where, bool required,
                      Violations& v) {
    const json* j = field(obj, key);
    if (!j) {
        if (required) v.add(std::string(where) + "." + key + " is required");
        return {};
    }
    if (!j->is_string() || j->get<std::string>().empty()) {
        v.add(std::string(where) + "." + key + " must be a non-empty string");
        return {};
    }
    return j->get<std::string>();
}

double read_number(const json& obj, const char* key, double fallback, const char* where,
                   Violations& v) {
    const json* j = field(obj, key);
    if (!j) return fallback;
    if (!j->is_number()) {
        v.add(std::string(where) + "." + key + " must be a number");
        return fallback;
    }
    return j->get<double>();
}

std::int64_t read_integer(const json& obj, const char* key, std::int64_t fallback,
                          const char* where, Violations& v) {
    const json* j = field(obj, key);
    if (!j) return fallback;
    if (!j->is_number_integer()) {
        v.add(std::string(where) + "." + key + " must be an integer");
        return fallback;
    }
    return j->get<std::int64_t>();
}

bool read_flag(const json& obj, const char* key, bool fallback, const char* where,
               Violations& v) {
    const json* j = field(obj, key);
    if (!j) return fallback;
    if (!j->is_boolean()) {
        v.add(std::string(where) + "." + key + " must be a boolean");
        return fallback;
    }
    return j->get<bool>();
}

void read_range(const json& obj, const char* key, const char* where, double& lo, double& hi,
                Violations& v) {
    const json* j = field(obj, key);
    if (!j) return;
    if (!j->is_array() || j->size() != 2 || !(*j)[0].is_number() || !(*j)[1].is_number()) {
        v.add(std::string(where) + "." + key + " must be a [low, high] number pair");
        return;
    }
    lo = (*j)[0].get<double>();
    hi = (*j)[1].get<double>();
    if (!(lo <= hi)) v.add(std::string(where) + "." + key + " has low > high");
}

void read_range(const json& obj, const char* key, const char* where, int& lo, int& hi,
                Violations& v) {
    const json* j = field(obj, key);
    if (!j) return;
    if (!j->is_array() || j->size() != 2 || !(*j)[0].is_number_integer() ||
        !(*j)[1].is_number_integer()) {
        v.add(std::string(where) + "." + key + " must be a [low, high] integer pair");
        return;
    }
    lo = (*j)[0].get<int>();
    hi = (*j)[1].get<int>();
    if (lo > hi) v.add(std::string(where) + "." + key + " has low > high");
}

// ------------------------------------------------------------- artifacts ---

fs::path stage_dir(const RunConfig& config, const char* stage) {
    return fs::path(config.out_dir) / stage;
}

fs::path artifact(const RunConfig& config, const char* stage, const std::string& name) {
    return stage_dir(config, stage) / name;
}

void require_artifact(const fs::path& path, const char* producing_stage) {
    if (!fs::exists(path))
        throw MissingArtifactError("missing artifact " + path.string() + "; run the '" +
                                   std::string(producing_stage) + "' stage first");
}

void write_json_file(const fs::path& path, const json& value) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << value.dump(2) << '\n';
}

void write_manifest(const RunConfig& config, const char* stage,
                    std::vector<std::string> inputs, std::vector<std::string> outputs) {
    std::sort(inputs.begin(), inputs.end());
    std::sort(outputs.begin(), outputs.end());
    json manifest{{"stage", stage},
                  {"stage_version", kStageVersion},
                  {"config_hash", config.config_hash},
                  {"seed", config.seed},
                  {"inputs", inputs},
                  {"outputs", outputs}};
    write_json_file(artifact(config, stage, "manifest.json"), manifest);
}

QuoteFormat quote_format(const InputsConfig& inputs) {
    if (inputs.quotes_format == "csv") return QuoteFormat::Csv;
    if (inputs.quotes_format == "jsonl") return QuoteFormat::Jsonl;
    return fs::path(inputs.quotes).extension() == ".jsonl" ? QuoteFormat::Jsonl
                                                           : QuoteFormat::Csv;
}

TimeGrid run_grid(const RunConfig& config) {
    return TimeGrid::spanning(config.grid.start, config.grid.end, config.grid.interval_seconds);
}

json report_to_json(const ParseReport& report) {
    return json{{"total_rows", report.total_rows},
                {"accepted", report.accepted},
                {"rejected", report.rejected},
                {"filtered_retweets", report.filtered_retweets},
                {"gaps", report.gaps},
                {"rejection_samples", report.rejection_samples}};
}

// The series the label stage produces, in canonical column order.
std::vector<std::string> series_names(const RunConfig& config) {
    std::vector<std::string> names{"vxbt"};
    if (!config.inputs.index.empty()) names.push_back("index");
    names.insert(names.end(), {"tweet_volume", "tweet_sentiment", "trends"});
    return names;
}

// ----------------------------------------------------------------- stages ---

void run_ingest(const RunConfig& config) {
    fs::create_directories(stage_dir(config, "ingest"));

    QuoteParseResult quotes = parse_quotes(config.inputs.quotes, quote_format(config.inputs));
    write_quotes(artifact(config, "ingest", "quotes.csv").string(), quotes.records,
                 QuoteFormat::Csv);

    TweetParseResult tweets = parse_tweets(config.inputs.tweets);
    write_tweets(artifact(config, "ingest", "tweets.jsonl").string(), tweets.records);

    TrendsParseResult trends = parse_trends(config.inputs.trends);
    write_trends(artifact(config, "ingest", "trends.csv").string(), trends.records);

    Lexicon lexicon = load_lexicon(config.inputs.lexicon);
    write_lexicon(artifact(config, "ingest", "lexicon.tsv").string(), lexicon);

    std::vector<std::string> inputs{config.inputs.quotes, config.inputs.tweets,
                                    config.inputs.trends, config.inputs.lexicon};
    std::vector<std::string> outputs{artifact(config, "ingest", "quotes.csv").string(),
                                     artifact(config, "ingest", "tweets.jsonl").string(),
                                     artifact(config, "ingest", "trends.csv").string(),
                                     artifact(config, "ingest", "lexicon.tsv").string()};

    json report{{"quotes", report_to_json(quotes.report)},
                {"tweets", report_to_json(tweets.report)},
                {"trends", report_to_json(trends.report)}};

    if (!config.inputs.index.empty()) {
        UniformSeries index = read_series_csv(config.inputs.index);
        write_series_csv(artifact(config, "ingest", "index.csv").string(), index);
        report["index"] = json{{"points", index.values.size()},
                               {"gaps", index.gap_count()}};
        inputs.push_back(config.inputs.index);
        outputs.push_back(artifact(config, "ingest", "index.csv").string());
    }

    write_json_file(artifact(config, "ingest", "report.json"), report);
    outputs.push_back(artifact(config, "ingest", "report.json").string());
    write_manifest(config, "ingest", std::move(inputs), std::move(outputs));
}

void run_index(const RunConfig& config) {
    fs::path quotes_path = artifact(config, "ingest", "quotes.csv");
    require_artifact(quotes_path, "ingest");
    fs::create_directories(stage_dir(config, "index"));

    QuoteParseResult quotes = parse_quotes(quotes_path.string(), QuoteFormat::Csv);
    VxbtSeriesResult result = compute_vxbt_series(quotes.records, run_grid(config),
                                                  config.index_params);

    write_series_csv(artifact(config, "index", "vxbt.csv").string(), result.series);
    write_vxbt_report(artifact(config, "index", "vxbt_report.json").string(), result.report);

    write_manifest(config, "index", {quotes_path.string()},
                   {artifact(config, "index", "vxbt.csv").string(),
                    artifact(config, "index", "vxbt_report.json").string()});
}

void run_signals(const RunConfig& config) {
    fs::path tweets_path = artifact(config, "ingest", "tweets.jsonl");
    fs::path trends_path = artifact(config, "ingest", "trends.csv");
    fs::path lexicon_path = artifact(config, "ingest", "lexicon.tsv");
    require_artifact(tweets_path, "ingest");
    require_artifact(trends_path, "ingest");
    require_artifact(lexicon_path, "ingest");
    fs::create_directories(stage_dir(config, "signals"));

    const TimeGrid grid = run_grid(config);
    Lexicon lexicon = load_lexicon(lexicon_path.string());

    TweetParseResult tweets = parse_tweets(tweets_path.string());
    TweetSeries buckets = aggregate_tweets(tweets.records, lexicon, grid);
    UniformSeries volume = ewma(buckets.volume, config.ewma_span);
    UniformSeries sentiment = ewma(buckets.sentiment, config.ewma_span);

    TrendsParseResult trends = parse_trends(trends_path.string());
    UniformSeries trends5 = upsample_linear(trends.records, grid);

    write_series_csv(artifact(config, "signals", "tweet_volume.csv").string(), volume);
    write_series_csv(artifact(config, "signals", "tweet_sentiment.csv").string(), sentiment);
    write_series_csv(artifact(config, "signals", "trends.csv").string(), trends5);

    std::vector<std::string> inputs{tweets_path.string(), trends_path.string(),
                                    lexicon_path.string()};
    std::vector<std::string> outputs{
        artifact(config, "signals", "tweet_volume.csv").string(),
        artifact(config, "signals", "tweet_sentiment.csv").string(),
        artifact(config, "signals", "trends.csv").string()};

    if (!config.inputs.index.empty()) {
        fs::path index_path = artifact(config, "ingest", "index.csv");
        require_artifact(index_path, "ingest");
        UniformSeries raw = read_series_csv(index_path.string());
        std::vector<std::pair<UtcSeconds, double>> points;
        for (std::size_t i = 0; i < raw.values.size(); ++i)
            if (!UniformSeries::is_gap(raw.values[i]))
                points.emplace_back(raw.timestamp(i), raw.values[i]);
        UniformSeries aligned = align_to_grid(points, grid);
        write_series_csv(artifact(config, "signals", "index.csv").string(), aligned);
        inputs.push_back(index_path.string());
        outputs.push_back(artifact(config, "signals", "index.csv").string());
    }

    write_manifest(config, "signals", std::move(inputs), std::move(outputs));
}

void run_label(const RunConfig& config) {
    fs::path vxbt_path = artifact(config, "index", "vxbt.csv");
    require_artifact(vxbt_path, "index");

    std::vector<std::pair<std::string, fs::path>> sources{{"vxbt", vxbt_path}};
    if (!config.inputs.index.empty())
        sources.emplace_back("index", artifact(config, "signals", "index.csv"));
    sources.emplace_back("tweet_volume", artifact(config, "signals", "tweet_volume.csv"));
    sources.emplace_back("tweet_sentiment", artifact(config, "signals", "tweet_sentiment.csv"));
    sources.emplace_back("trends", artifact(config, "signals", "trends.csv"));
    for (const auto& [name, path] : sources)
        if (name != "vxbt") require_artifact(path, "signals");

    fs::create_directories(stage_dir(config, "label"));

    json fits = json::array();
    std::vector<std::string> inputs, outputs;
    for (const auto& [name, path] : sources) {
        UniformSeries series = read_series_csv(path.string());
        std::size_t filled = fill_gaps(series);

        const std::size_t n = series.values.size();
        IndexRange fit_range{0, n};
        if (config.labeling_mode == LabelingMode::LeakSafe)
            fit_range.end = static_cast<std::size_t>(config.train_fraction *
                                                     static_cast<double>(n));
        UniformSeries normalized = minmax_normalize(series, fit_range);

        ThresholdFit fit = fit_threshold(normalized);
        DirectionSeries directions = label_directions(normalized, fit.theta);
        fs::path out_path = artifact(config, "label", name + "_directions.csv");
        write_directions_csv(out_path.string(), directions);

        fits.push_back(json{{"series", name},
                            {"theta", fit.theta},
                            {"counts", fit.class_counts},
                            {"imbalance", fit.imbalance},
                            {"degenerate", fit.degenerate},
                            {"gaps_filled", filled}});
        inputs.push_back(path.string());
        outputs.push_back(out_path.string());
    }

    write_json_file(artifact(config, "label", "thresholds.json"), fits);
    outputs.push_back(artifact(config, "label", "thresholds.json").string());
    write_manifest(config, "label", std::move(inputs), std::move(outputs));
}

std::vector<std::pair<std::string, DirectionSeries>> read_label_artifacts(
    const RunConfig& config) {
    std::vector<std::pair<std::string, DirectionSeries>> directions;
    for (const std::string& name : series_names(config)) {
        fs::path path = artifact(config, "label", name + "_directions.csv");
        require_artifact(path, "label");
        directions.emplace_back(name, read_directions_csv(path.string()));
    }
    return directions;
}

void run_dataset(const RunConfig& config) {
    auto directions = read_label_artifacts(config);
    fs::create_directories(stage_dir(config, "dataset"));

    LabeledDataset ds = windowize(directions, config.target_series, config.window,
                                  config.horizon);
    write_dataset(artifact(config, "dataset", "features.csv").string(),
                  artifact(config, "dataset", "targets.csv").string(),
                  artifact(config, "dataset", "dataset.json").string(), ds);

    std::vector<std::string> inputs;
    for (const auto& [name, series] : directions)
        inputs.push_back(artifact(config, "label", name + "_directions.csv").string());
    write_manifest(config, "dataset", std::move(inputs),
                   {artifact(config, "dataset", "features.csv").string(),
                    artifact(config, "dataset", "targets.csv").string(),
                    artifact(config, "dataset", "dataset.json").string()});
}

LabeledDataset read_dataset_artifacts(const RunConfig& config) {
    fs::path features = artifact(config, "dataset", "features.csv");
    fs::path targets = artifact(config, "dataset", "targets.csv");
    fs::path manifest = artifact(config, "dataset", "dataset.json");
    require_artifact(features, "dataset");
    require_artifact(targets, "dataset");
    require_artifact(manifest, "dataset");
    return read_dataset(features.string(), targets.string(), manifest.string());
}

json confusion_to_json(const ConfusionMatrix& cm) {
    json rows = json::array();
    for (int a = 0; a < kNumClasses; ++a) {
        json row = json::array();
        for (int p = 0; p < kNumClasses; ++p) row.push_back(cm.counts[a][p]);
        rows.push_back(row);
    }
    return rows;
}

json config_to_json(const GbmConfig& c) {
    return json{{"learning_rate", c.learning_rate},
                {"n_stages", c.n_stages},
                {"max_depth", c.max_depth},
                {"min_samples_leaf", c.min_samples_leaf},
                {"subsample", c.subsample},
                {"seed", c.seed}};
}

void run_train(const RunConfig& config) {
    LabeledDataset ds = read_dataset_artifacts(config);
    fs::create_directories(stage_dir(config, "train"));

    SplitDataset split = chrono_split(ds, config.train_fraction);
    TuneResult tuned = tune(split.train, config.tuning);
    GbmModel model = fit(split.train, tuned.chosen);

    save_model(artifact(config, "train", "model.json").string(), model);

    SearchResult log;
    log.trials = tuned.random_stage.trials;
    log.trials.insert(log.trials.end(), tuned.grid_stage.trials.begin(),
                      tuned.grid_stage.trials.end());
    write_search_log(artifact(config, "train", "search_log.csv").string(), log);

    double test_accuracy = accuracy(model, split.test);
    ConfusionMatrix cm = confusion_matrix(model, split.test);
    json metrics{{"test_accuracy", test_accuracy},
                 {"confusion", confusion_to_json(cm)},
                 {"train_samples", split.train.samples()},
                 {"test_samples", split.test.samples()},
                 {"chosen_config", config_to_json(tuned.chosen)},
                 {"tuned", config.tuning.enabled}};
    write_json_file(artifact(config, "train", "metrics.json"), metrics);

    write_manifest(config, "train",
                   {artifact(config, "dataset", "features.csv").string(),
                    artifact(config, "dataset", "targets.csv").string(),
                    artifact(config, "dataset", "dataset.json").string()},
                   {artifact(config, "train", "model.json").string(),
                    artifact(config, "train", "search_log.csv").string(),
                    artifact(config, "train", "metrics.json").string()});
}

void run_importance(const RunConfig& config) {
    fs::path model_path = artifact(config, "train", "model.json");
    require_artifact(model_path, "train");
    LabeledDataset ds = read_dataset_artifacts(config);
    fs::create_directories(stage_dir(config, "importance"));

    GbmModel model = load_model(model_path.string());
    SplitDataset split = chrono_split(ds, config.train_fraction);

    ImportanceParams params;
    params.repeats = config.importance_repeats;
    params.seed = config.seed;
    ImportanceReport report = permutation_importance(model, split.test, params);

    write_importance_csv(artifact(config, "importance", "importance.csv").string(), report);
    ImportanceReport social =
        filter_series(report, {"tweet_volume", "tweet_sentiment", "trends"});
    write_importance_csv(
        artifact(config, "importance", "importance_nonfinancial.csv").string(), social);

    write_json_file(artifact(config, "importance", "summary.json"),
                    json{{"baseline_accuracy", report.baseline_accuracy},
                         {"repeats", config.importance_repeats},
                         {"features", report.entries.size()}});

    write_manifest(config, "importance",
                   {model_path.string(),
                    artifact(config, "dataset", "features.csv").string(),
                    artifact(config, "dataset", "targets.csv").string(),
                    artifact(config, "dataset", "dataset.json").string()},
                   {artifact(config, "importance", "importance.csv").string(),
                    artifact(config, "importance", "importance_nonfinancial.csv").string(),
                    artifact(config, "importance", "summary.json").string()});
}

void run_sweep(const RunConfig& config) {
    fs::path model_path = artifact(config, "train", "model.json");
    require_artifact(model_path, "train");
    auto directions = read_label_artifacts(config);
    fs::create_directories(stage_dir(config, "sweep"));

    SweepParams params;
    params.windows = config.sweep.windows;
    if (params.windows.empty())
        for (std::size_t w = 1; w <= 48; ++w) params.windows.push_back(w);
    params.horizon = config.horizon;
    params.train_fraction = config.train_fraction;
    params.model = load_model(model_path.string()).config;
    params.folds = config.sweep.folds;

    SweepResult result = window_sweep(directions, config.target_series, params);
    write_sweep_csv(artifact(config, "sweep", "sweep.csv").string(), result,
                    config.grid.interval_seconds);

    std::vector<std::string> inputs{model_path.string()};
    for (const auto& [name, series] : directions)
        inputs.push_back(artifact(config, "label", name + "_directions.csv").string());
    write_manifest(config, "sweep", std::move(inputs),
                   {artifact(config, "sweep", "sweep.csv").string()});
}

}  // namespace

RunConfig load_config(const std::string& path, const CliOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const std::exception& ex) {
        throw ConfigError("config parse error in " + path + ": " + ex.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    Violations v;
    RunConfig config;

    static const char* known_keys[] = {"seed",    "out_dir", "inputs",     "grid",
                                       "index",   "signals", "labeling",   "dataset",
                                       "split",   "train",   "importance", "sweep"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        bool known = false;
        for (const char* key : known_keys) known = known || it.key() == key;
        if (!known) v.add("unknown config key: " + it.key());
    }

    if (const json* seed = field(root, "seed")) {
        if (seed->is_number_unsigned() || seed->is_number_integer())
            config.seed = seed->get<std::uint64_t>();
        else
            v.add("seed must be an integer");
    } else if (!overrides.seed) {
        v.add("seed is required (no implicit defaults)");
    }

    if (const json* out = field(root, "out_dir")) {
        if (out->is_string() && !out->get<std::string>().empty())
            config.out_dir = out->get<std::string>();
        else
            v.add("out_dir must be a non-empty string");
    }

    if (const json* inputs = field(root, "inputs"); inputs && inputs->is_object()) {
        config.inputs.quotes = read_path(*inputs, "quotes", "inputs", true, v);
        config.inputs.tweets = read_path(*inputs, "tweets", "inputs", true, v);
        config.inputs.trends = read_path(*inputs, "trends", "inputs", true, v);
        config.inputs.lexicon = read_path(*inputs, "lexicon", "inputs", true, v);
        config.inputs.index = read_path(*inputs, "index", "inputs", false, v);
        if (const json* fmt = field(*inputs, "quotes_format")) {
            if (fmt->is_string() &&
                (fmt->get<std::string>() == "csv" || fmt->get<std::string>() == "jsonl"))
                config.inputs.quotes_format = fmt->get<std::string>();
            else
                v.add("inputs.quotes_format must be \"csv\" or \"jsonl\"");
        }
    } else {
        v.add("inputs section is required");
    }

    if (const json* grid = field(root, "grid"); grid && grid->is_object()) {
        auto start = read_instant(*grid, "start", "grid", v);
        auto end = read_instant(*grid, "end", "grid", v);
        config.grid.interval_seconds =
            read_integer(*grid, "interval_seconds", kFiveMinutes, "grid", v);
        if (config.grid.interval_seconds <= 0) v.add("grid.interval_seconds must be positive");
        if (start && end) {
            config.grid.start = *start;
            config.grid.end = *end;
            if (*start >= *end) v.add("grid.start must precede grid.end");
            else if (config.grid.interval_seconds > 0 &&
                     (*end - *start) % config.grid.interval_seconds != 0)
                v.add("grid.interval_seconds must divide the grid span");
        }
    } else {
        v.add("grid section is required");
    }

    if (const json* idx = field(root, "index"); idx && idx->is_object()) {
        config.index_params.risk_free_rate =
            read_number(*idx, "risk_free_rate", 0.0, "index", v);
        config.index_params.staleness_minutes =
            read_integer(*idx, "staleness_minutes", 60, "index", v);
        config.index_params.min_quotes_per_expiry = static_cast<int>(
            read_integer(*idx, "min_quotes_per_expiry", 2, "index", v));
        config.index_params.target_maturity_minutes =
            read_integer(*idx, "target_maturity_minutes", 7 * 1440, "index", v);
        config.index_params.eq2_minus = read_flag(*idx, "eq2_minus", false, "index", v);
        config.index_params.cboe_zero_bid_rule =
            read_flag(*idx, "cboe_zero_bid_rule", false, "index", v);
        if (config.index_params.staleness_minutes <= 0)
            v.add("index.staleness_minutes must be positive");
        if (config.index_params.min_quotes_per_expiry < 2)
            v.add("index.min_quotes_per_expiry must be at least 2");
    } else if (idx) {
        v.add("index section must be an object");
    }

    if (const json* sig = field(root, "signals"); sig && sig->is_object()) {
        config.ewma_span = static_cast<int>(read_integer(*sig, "ewma_span", 12, "signals", v));
        if (config.ewma_span < 1) v.add("signals.ewma_span must be at least 1");
    } else if (sig) {
        v.add("signals section must be an object");
    }

    if (const json* lab = field(root, "labeling"); lab && lab->is_object()) {
        if (const json* mode = field(*lab, "mode")) {
            if (mode->is_string() && mode->get<std::string>() == "leak-safe")
                config.labeling_mode = LabelingMode::LeakSafe;
            else if (mode->is_string() && mode->get<std::string>() == "strict-paper")
                config.labeling_mode = LabelingMode::StrictPaper;
            else
                v.add("labeling.mode must be \"leak-safe\" or \"strict-paper\"");
        }
    } else if (lab) {
        v.add("labeling section must be an object");
    }

    if (const json* ds = field(root, "dataset"); ds && ds->is_object()) {
        config.window =
            static_cast<std::size_t>(read_integer(*ds, "window", 24, "dataset", v));
        config.horizon =
            static_cast<std::size_t>(read_integer(*ds, "horizon", 1, "dataset", v));
        if (const json* target = field(*ds, "target")) {
            if (target->is_string() && !target->get<std::string>().empty())
                config.target_series = target->get<std::string>();
            else
                v.add("dataset.target must be a non-empty string");
        }
        if (config.window < 1) v.add("dataset.window must be at least 1");
        if (config.horizon < 1) v.add("dataset.horizon must be at least 1");
    } else if (ds) {
        v.add("dataset section must be an object");
    }

    if (const json* split = field(root, "split"); split && split->is_object()) {
        config.train_fraction = read_number(*split, "train_fraction", 0.9, "split", v);
        if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
            v.add("split.train_fraction must lie in (0, 1)");
    } else if (split) {
        v.add("split section must be an object");
    }

    if (const json* train = field(root, "train"); train && train->is_object()) {
        config.tuning.enabled = read_flag(*train, "tune", true, "train", v);
        config.tuning.random_trials = static_cast<std::size_t>(
            read_integer(*train, "random_trials", 20, "train", v));
        config.tuning.grid_refine = read_flag(*train, "grid_refine", true, "train", v);
        if (config.tuning.random_trials < 1) v.add("train.random_trials must be at least 1");
        if (const json* space = field(*train, "space"); space && space->is_object()) {
            read_range(*space, "learning_rate", "train.space",
                       config.tuning.space.learning_rate_min,
                       config.tuning.space.learning_rate_max, v);
            read_range(*space, "n_stages", "train.space", config.tuning.space.n_stages_min,
                       config.tuning.space.n_stages_max, v);
            read_range(*space, "max_depth", "train.space", config.tuning.space.max_depth_min,
                       config.tuning.space.max_depth_max, v);
            config.tuning.space.folds = static_cast<std::size_t>(
                read_integer(*space, "folds", 5, "train.space", v));
            if (config.tuning.space.folds < 2) v.add("train.space.folds must be at least 2");
        } else if (space) {
            v.add("train.space must be an object");
        }
        if (const json* fixed = field(*train, "fixed"); fixed && fixed->is_object()) {
            config.tuning.fixed.learning_rate =
                read_number(*fixed, "learning_rate", 0.1, "train.fixed", v);
            config.tuning.fixed.n_stages = static_cast<int>(
                read_integer(*fixed, "n_stages", 100, "train.fixed", v));
            config.tuning.fixed.max_depth =
                static_cast<int>(read_integer(*fixed, "max_depth", 3, "train.fixed", v));
            config.tuning.fixed.min_samples_leaf = static_cast<int>(
                read_integer(*fixed, "min_samples_leaf", 1, "train.fixed", v));
            config.tuning.fixed.subsample =
                read_number(*fixed, "subsample", 1.0, "train.fixed", v);
            try {
                config.tuning.fixed.validate();
            } catch (const std::exception& ex) {
                v.add(std::string("train.fixed: ") + ex.what());
            }
        } else if (fixed) {
            v.add("train.fixed must be an object");
        }
    } else if (train) {
        v.add("train section must be an object");
    }

    if (const json* imp = field(root, "importance"); imp && imp->is_object()) {
        config.importance_repeats = static_cast<std::size_t>(
            read_integer(*imp, "repeats", 10, "importance", v));
        if (config.importance_repeats < 1) v.add("importance.repeats must be at least 1");
    } else if (imp) {
        v.add("importance section must be an object");
    }

    if (const json* sweep = field(root, "sweep"); sweep && sweep->is_object()) {
        if (const json* windows = field(*sweep, "windows")) {
            if (!windows->is_array()) {
                v.add("sweep.windows must be an array of positive integers");
            } else {
                for (const json& w : *windows) {
                    if (!w.is_number_integer() || w.get<std::int64_t>() < 1) {
                        v.add("sweep.windows must be an array of positive integers");
                        config.sweep.windows.clear();
                        break;
                    }
                    config.sweep.windows.push_back(w.get<std::size_t>());
                }
                for (std::size_t i = 1; i < config.sweep.windows.size(); ++i)
                    if (config.sweep.windows[i] <= config.sweep.windows[i - 1]) {
                        v.add("sweep.windows must be strictly increasing");
                        break;
                    }
            }
        }
        config.sweep.folds =
            static_cast<std::size_t>(read_integer(*sweep, "folds", 5, "sweep", v));
        if (config.sweep.folds < 2) v.add("sweep.folds must be at least 2");
    } else if (sweep) {
        v.add("sweep section must be an object");
    }

    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.paper_compat) config.labeling_mode = LabelingMode::StrictPaper;
    if (overrides.paper_eq2_minus) config.index_params.eq2_minus = true;

    config.tuning.seed = config.seed;
    config.tuning.fixed.seed = config.seed;

    if (!v.empty()) v.raise();

    config.config_hash = fnv1a_hex(canonical_config(config));
    return config;
}

std::string canonical_config(const RunConfig& config) {
    json root{
        {"seed", config.seed},
        {"out_dir", config.out_dir},
        {"inputs",
         {{"quotes", config.inputs.quotes},
          {"quotes_format", config.inputs.quotes_format},
          {"tweets", config.inputs.tweets},
          {"trends", config.inputs.trends},
          {"index", config.inputs.index},
          {"lexicon", config.inputs.lexicon}}},
        {"grid",
         {{"start", format_iso8601(config.grid.start)},
          {"end", format_iso8601(config.grid.end)},
          {"interval_seconds", config.grid.interval_seconds}}},
        {"index",
         {{"risk_free_rate", config.index_params.risk_free_rate},
          {"staleness_minutes", config.index_params.staleness_minutes},
          {"min_quotes_per_expiry", config.index_params.min_quotes_per_expiry},
          {"target_maturity_minutes", config.index_params.target_maturity_minutes},
          {"eq2_minus", config.index_params.eq2_minus},
          {"cboe_zero_bid_rule", config.index_params.cboe_zero_bid_rule}}},
        {"signals", {{"ewma_span", config.ewma_span}}},
        {"labeling",
         {{"mode",
           config.labeling_mode == LabelingMode::LeakSafe ? "leak-safe" : "strict-paper"}}},
        {"dataset",
         {{"window", config.window},
          {"horizon", config.horizon},
          {"target", config.target_series}}},
        {"split", {{"train_fraction", config.train_fraction}}},
        {"train",
         {{"tune", config.tuning.enabled},
          {"random_trials", config.tuning.random_trials},
          {"grid_refine", config.tuning.grid_refine},
          {"space",
           {{"learning_rate",
             {config.tuning.space.learning_rate_min, config.tuning.space.learning_rate_max}},
            {"n_stages", {config.tuning.space.n_stages_min, config.tuning.space.n_stages_max}},
            {"max_depth",
             {config.tuning.space.max_depth_min, config.tuning.space.max_depth_max}},
            {"folds", config.tuning.space.folds}}},
          {"fixed", config_to_json(config.tuning.fixed)}}},
        {"importance", {{"repeats", config.importance_repeats}}},
        {"sweep", {{"windows", config.sweep.windows}, {"folds", config.sweep.folds}}}};
    return root.dump();
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

void run_stage(const std::string& stage, const RunConfig& config) {
    fs::create_directories(config.out_dir);
    {
        std::ofstream out(fs::path(config.out_dir) / "config.effective.json");
        if (!out)
            throw std::runtime_error("cannot open for writing: " + config.out_dir +
                                     "/config.effective.json");
        out << canonical_config(config) << '\n';
    }

    if (stage == "ingest") return run_ingest(config);
    if (stage == "index") return run_index(config);
    if (stage == "signals") return run_signals(config);
    if (stage == "label") return run_label(config);
    if (stage == "dataset") return run_dataset(config);
    if (stage == "train") return run_train(config);
    if (stage == "importance") return run_importance(config);
    if (stage == "sweep") return run_sweep(config);
    if (stage == "all") {
        run_ingest(config);
        run_index(config);
        run_signals(config);
        run_label(config);
        run_dataset(config);
        run_train(config);
        run_importance(config);
        run_sweep(config);
        return;
    }
    throw std::invalid_argument("unknown stage: " + stage);
}

}  // namespace fearlab
