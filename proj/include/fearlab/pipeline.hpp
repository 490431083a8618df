#pragma once

#include "fearlab/experiments.hpp"
#include "fearlab/volindex.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fearlab {

struct GridConfig {
    UtcSeconds start = 0;
    UtcSeconds end = 0;  // inclusive; interval must divide end - start
    std::int64_t interval_seconds = kFiveMinutes;
};

enum class LabelingMode { LeakSafe, StrictPaper };

struct InputsConfig {
    std::string quotes;
    std::string quotes_format;  // "csv" or "jsonl"; empty = infer from extension
    std::string tweets;
    std::string trends;
    std::string index;  // optional; omitted series when empty
    std::string lexicon;
};

struct SweepConfig {
    std::vector<std::size_t> windows;  // default 1..48 when empty
    std::size_t folds = 5;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    InputsConfig inputs;
    GridConfig grid;
    IndexParams index_params;
    int ewma_span = 12;
    LabelingMode labeling_mode = LabelingMode::LeakSafe;
    std::size_t window = 24;
    std::size_t horizon = 1;
    std::string target_series = "vxbt";
    double train_fraction = 0.9;
    TuningPlan tuning;
    std::size_t importance_repeats = 10;
    SweepConfig sweep;

    // Hex FNV-1a over the canonical serialized form; stamped into manifests.
    std::string config_hash;
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool paper_compat = false;    // labeling_mode := StrictPaper
    bool paper_eq2_minus = false; // index_params.eq2_minus := true
};

// Config file problems: parse errors or validation failures. The message
// lists every violation found, not just the first.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A stage was asked to read an artifact its prerequisite has not produced.
struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

RunConfig load_config(const std::string& path, const CliOverrides& overrides);

// Canonical serialized form of an effective config (deterministic key order).
std::string canonical_config(const RunConfig& config);

std::string fnv1a_hex(std::string_view bytes);

inline constexpr const char* kStageNames[] = {"ingest", "index",      "signals",
                                              "label",  "dataset",    "train",
                                              "importance", "sweep",  "all"};

// Runs one stage (or the whole chain for "all"), reading upstream artifacts
// from the config's output directory and writing this stage's artifacts plus
// a manifest. Throws MissingArtifactError naming the stage to run first, or
// std::runtime_error for other failures.
void run_stage(const std::string& stage, const RunConfig& config);

}  // namespace fearlab
