#include "fearlab/series.hpp"

#include "fearlab/csv.hpp"

#include <fstream>
#include <stdexcept>

namespace fearlab {

std::size_t UniformSeries::gap_count() const {
    std::size_t n = 0;
    for (double v : values)
        if (is_gap(v)) ++n;
    return n;
}

std::size_t fill_gaps(UniformSeries& series) {
    std::size_t filled = 0;
    double first = UniformSeries::gap();
    for (double v : series.values) {
        if (!UniformSeries::is_gap(v)) {
            first = v;
            break;
        }
    }
    if (UniformSeries::is_gap(first)) return 0;  // all gaps, nothing to fill from

    double last = first;
    for (double& v : series.values) {
        if (UniformSeries::is_gap(v)) {
            v = last;
            ++filled;
        } else {
            last = v;
        }
    }
    return filled;
}

void write_series_csv(const std::string& path, const UniformSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "timestamp,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_iso8601(series.timestamp(i)) << ',';
        if (!UniformSeries::is_gap(series.values[i])) out << format_double(series.values[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

UniformSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty series file: " + path);

    UniformSeries series;
    std::vector<UtcSeconds> stamps;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 2) throw std::runtime_error("bad series row in " + path + ": " + line);
        auto ts = parse_iso8601(fields[0]);
        if (!ts) throw std::runtime_error("bad timestamp in " + path + ": " + fields[0]);
        stamps.push_back(*ts);
        auto v = parse_double(fields[1]);
        series.values.push_back(v ? *v : UniformSeries::gap());
    }
    if (stamps.empty()) throw std::runtime_error("series has no rows: " + path);
    series.start = stamps.front();
    series.interval = stamps.size() > 1 ? stamps[1] - stamps[0] : kFiveMinutes;
    if (series.interval <= 0) throw std::runtime_error("non-increasing timestamps: " + path);
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        if (stamps[i] != series.timestamp(i))
            throw std::runtime_error("series not on a uniform grid: " + path);
    }
    return series;
}

}  // namespace fearlab
