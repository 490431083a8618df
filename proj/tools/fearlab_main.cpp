#include "fearlab/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Implied-volatility index construction and direction-forecast pipeline"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool paper_compat = false;
    bool paper_eq2_minus = false;

    app.add_option("--config", config_path, "Run configuration file (JSON)")->required();
    CLI::Option* seed_opt = app.add_option("--seed", seed, "Override the config seed");
    CLI::Option* out_opt = app.add_option("--out", out_dir, "Override the output directory");
    app.add_flag("--paper-compat", paper_compat,
                 "Fit normalisation on the full series instead of the training prefix");
    app.add_flag("--paper-eq2-minus", paper_eq2_minus,
                 "Subtract the far-term maturity contribution instead of adding it");

    app.add_subcommand("ingest", "Parse and normalise the raw input files");
    app.add_subcommand("index", "Compute the 7-day implied-volatility index series");
    app.add_subcommand("signals", "Build tweet-volume, tweet-sentiment, trends and price series");
    app.add_subcommand("label", "Normalise series and assign direction classes");
    app.add_subcommand("dataset", "Windowise direction series into a supervised dataset");
    app.add_subcommand("train", "Tune and fit the boosted-tree classifier");
    app.add_subcommand("importance", "Rank features by permutation importance");
    app.add_subcommand("sweep", "Cross-validated accuracy across lookback windows");
    app.add_subcommand("all", "Run every stage in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    fearlab::CliOverrides overrides;
    if (seed_opt->count() > 0) overrides.seed = seed;
    if (out_opt->count() > 0) overrides.out_dir = out_dir;
    overrides.paper_compat = paper_compat;
    overrides.paper_eq2_minus = paper_eq2_minus;

    fearlab::RunConfig config;
    try {
        config = fearlab::load_config(config_path, overrides);
    } catch (const fearlab::ConfigError& ex) {
        std::cerr << ex.what() << '\n';
        return 1;
    }

    const std::string stage = app.get_subcommands().front()->get_name();
    try {
        fearlab::run_stage(stage, config);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
