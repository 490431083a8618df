#include "fearlab/dataset.hpp"

#include "fearlab/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fearlab {

LabeledDataset windowize(const std::vector<std::pair<std::string, DirectionSeries>>& directions,
                         const std::string& target_series, std::size_t window,
                         std::size_t horizon) {
    if (directions.empty()) throw std::invalid_argument("windowize: no series");
    if (window < 1 || horizon < 1)
        throw std::invalid_argument("windowize: window and horizon must be >= 1");

    const DirectionSeries* target = nullptr;
    const DirectionSeries& reference = directions.front().second;
    for (const auto& [name, series] : directions) {
        if (!series.same_grid(reference))
            throw std::invalid_argument("windowize: series misaligned: " + name);
        if (name == target_series) target = &series;
    }
    if (!target) throw std::invalid_argument("windowize: target series not found: " + target_series);

    const std::size_t length = reference.size();
    if (window + horizon >= length + 1)
        throw std::invalid_argument("windowize: window + horizon too large for series length");

    LabeledDataset ds;
    for (const auto& [name, series] : directions) {
        for (std::size_t lag = 0; lag < window; ++lag)
            ds.feature_names.push_back({name, static_cast<int>(lag)});
    }

    // Valid sample slots t: window-1 <= t <= length-1-horizon.
    const std::size_t first = window - 1;
    const std::size_t last = length - 1 - horizon;
    const std::size_t count = last - first + 1;
    ds.features.reserve(count * ds.width());
    ds.targets.reserve(count);
    ds.timestamps.reserve(count);

    for (std::size_t t = first; t <= last; ++t) {
        for (const auto& [name, series] : directions) {
            for (std::size_t lag = 0; lag < window; ++lag)
                ds.features.push_back(static_cast<double>(series.labels[t - lag]));
        }
        ds.targets.push_back(target->labels[t + horizon]);
        ds.timestamps.push_back(reference.start +
                                static_cast<std::int64_t>(t) * reference.interval);
    }
    return ds;
}

SplitDataset chrono_split(const LabeledDataset& ds, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("chrono_split: train_fraction must be in (0, 1)");
    const std::size_t n = ds.samples();
    const std::size_t split = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n)));
    if (split == 0 || split == n)
        throw std::invalid_argument("chrono_split: a side of the split is empty");
    return {slice_rows(ds, 0, split), slice_rows(ds, split, n)};
}

LabeledDataset slice_rows(const LabeledDataset& ds, std::size_t begin, std::size_t end) {
    if (begin > end || end > ds.samples())
        throw std::invalid_argument("slice_rows: range out of bounds");
    LabeledDataset part;
    part.feature_names = ds.feature_names;
    part.features.assign(ds.features.begin() + begin * ds.width(),
                         ds.features.begin() + end * ds.width());
    part.targets.assign(ds.targets.begin() + begin, ds.targets.begin() + end);
    part.timestamps.assign(ds.timestamps.begin() + begin, ds.timestamps.begin() + end);
    return part;
}

void write_dataset(const std::string& features_path, const std::string& targets_path,
                   const std::string& manifest_path, const LabeledDataset& ds) {
    {
        std::ofstream out(features_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + features_path);
        out << "timestamp";
        for (const auto& name : ds.feature_names) out << ',' << name.column();
        out << '\n';
        for (std::size_t i = 0; i < ds.samples(); ++i) {
            out << format_iso8601(ds.timestamps[i]);
            const double* row = ds.row(i);
            for (std::size_t j = 0; j < ds.width(); ++j)
                out << ',' << static_cast<int>(row[j]);
            out << '\n';
        }
    }
    {
        std::ofstream out(targets_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + targets_path);
        out << "timestamp,target\n";
        for (std::size_t i = 0; i < ds.samples(); ++i)
            out << format_iso8601(ds.timestamps[i]) << ',' << static_cast<int>(ds.targets[i])
                << '\n';
    }
    {
        nlohmann::json manifest;
        manifest["samples"] = ds.samples();
        manifest["width"] = ds.width();
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& name : ds.feature_names) {
            cols.push_back({{"series", name.series},
                            {"lag", name.lag},
                            {"label", name.display()},
                            {"column", name.column()}});
        }
        manifest["columns"] = cols;
        std::ofstream out(manifest_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + manifest_path);
        out << manifest.dump(2) << '\n';
    }
}

LabeledDataset read_dataset(const std::string& features_path, const std::string& targets_path,
                            const std::string& manifest_path) {
    LabeledDataset ds;
    {
        std::ifstream in(manifest_path);
        if (!in) throw std::runtime_error("cannot open: " + manifest_path);
        nlohmann::json manifest = nlohmann::json::parse(in);
        for (const auto& col : manifest.at("columns"))
            ds.feature_names.push_back(
                {col.at("series").get<std::string>(), col.at("lag").get<int>()});
    }
    {
        std::ifstream in(features_path);
        if (!in) throw std::runtime_error("cannot open: " + features_path);
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty file: " + features_path);
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != ds.width() + 1)
                throw std::runtime_error("feature row width mismatch in " + features_path);
            auto ts = parse_iso8601(fields[0]);
            if (!ts) throw std::runtime_error("bad timestamp in " + features_path);
            ds.timestamps.push_back(*ts);
            for (std::size_t j = 1; j < fields.size(); ++j) {
                auto v = parse_double(fields[j]);
                if (!v) throw std::runtime_error("bad feature value in " + features_path);
                ds.features.push_back(*v);
            }
        }
    }
    {
        std::ifstream in(targets_path);
        if (!in) throw std::runtime_error("cannot open: " + targets_path);
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty file: " + targets_path);
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != 2) throw std::runtime_error("bad target row in " + targets_path);
            auto v = parse_double(fields[1]);
            if (!v) throw std::runtime_error("bad target value in " + targets_path);
            ds.targets.push_back(static_cast<std::int8_t>(*v));
        }
    }
    if (ds.targets.size() != ds.timestamps.size())
        throw std::runtime_error("dataset features/targets row count mismatch");
    return ds;
}

}  // namespace fearlab
