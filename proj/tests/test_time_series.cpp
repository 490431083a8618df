#include "fearlab/csv.hpp"
#include "fearlab/series.hpp"
#include "fearlab/time_utils.hpp"

#include "doctest.h"
#include "support/oracles.hpp"

#include <cmath>
#include <fstream>
#include <random>

using namespace fearlab;

TEST_SUITE("time") {

TEST_CASE("parses known instants") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601("2017-01-01T00:00:00Z") == 1483228800);
    CHECK(parse_iso8601("2021-02-12T08:00:00Z") == 1613116800);
    CHECK(parse_iso8601("2000-03-01T00:00:00Z") == 951868800);
}

TEST_CASE("accepts documented format variants") {
    const UtcSeconds midnight = 1613088000;  // 2021-02-12T00:00:00Z
    CHECK(parse_iso8601("2021-02-12") == midnight);
    CHECK(parse_iso8601("2021-02-12 08:00") == midnight + 8 * kSecondsPerHour);
    CHECK(parse_iso8601("2021-02-12T08:00") == midnight + 8 * kSecondsPerHour);
    CHECK(parse_iso8601("2021-02-12T08:00:30") == midnight + 8 * kSecondsPerHour + 30);
    CHECK(parse_iso8601("2021-02-12T08:00:30Z") == midnight + 8 * kSecondsPerHour + 30);
    // Fractional seconds truncate.
    CHECK(parse_iso8601("2021-02-12T08:00:30.999Z") == midnight + 8 * kSecondsPerHour + 30);
}

TEST_CASE("rejects malformed instants") {
    CHECK_FALSE(parse_iso8601(""));
    CHECK_FALSE(parse_iso8601("not a date"));
    CHECK_FALSE(parse_iso8601("2021-13-01"));
    CHECK_FALSE(parse_iso8601("2021-02-30"));
    CHECK_FALSE(parse_iso8601("2021-02-12T25:00:00Z"));
    CHECK_FALSE(parse_iso8601("2021-02-12T08:61:00Z"));
    CHECK_FALSE(parse_iso8601("12/02/2021"));
}

TEST_CASE("format and parse round-trip random instants") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<UtcSeconds> dist(0, 4'000'000'000LL);
    for (int i = 0; i < 1000; ++i) {
        UtcSeconds ts = dist(rng);
        auto back = parse_iso8601(format_iso8601(ts));
        REQUIRE(back);
        CHECK(*back == ts);
    }
}

TEST_CASE("civil conversions invert each other") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(1970, 1, 2) == 1);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> dist(-200000, 200000);
    for (int i = 0; i < 500; ++i) {
        std::int64_t days = dist(rng);
        int y, m, d;
        civil_from_days(days, y, m, d);
        CHECK(days_from_civil(y, m, d) == days);
    }
}

TEST_CASE("weekday matches known dates") {
    CHECK(weekday_utc(0) == 4);                    // 1970-01-01, Thursday
    CHECK(weekday_utc(1613088000) == 5);           // 2021-02-12, Friday
    CHECK(weekday_utc(*parse_iso8601("2026-01-05")) == 1);  // Monday
}

TEST_CASE("friday morning expiry test") {
    const UtcSeconds friday_0800 = 1613116800;  // 2021-02-12T08:00:00Z
    CHECK(is_friday_0800(friday_0800));
    CHECK_FALSE(is_friday_0800(friday_0800 + 60));
    CHECK_FALSE(is_friday_0800(friday_0800 - kSecondsPerDay));  // Thursday 08:00
    CHECK(is_friday_0800(friday_0800 + 7 * kSecondsPerDay));
}

TEST_CASE("spanning grid includes both endpoints") {
    TimeGrid grid = TimeGrid::spanning(0, 600, 300);
    CHECK(grid.count == 3);
    CHECK(grid.at(0) == 0);
    CHECK(grid.at(2) == 600);
    CHECK(grid.end() == 600);

    TimeGrid single = TimeGrid::spanning(1000, 1000, 300);
    CHECK(single.count == 1);
    CHECK(single.end() == 1000);
}

TEST_CASE("bucket floors within range and rejects outside") {
    TimeGrid grid = TimeGrid::spanning(1000, 1600, 300);  // covers [1000, 1900)
    CHECK(grid.bucket(1000) == 0);
    CHECK(grid.bucket(1299) == 0);
    CHECK(grid.bucket(1300) == 1);
    CHECK(grid.bucket(1899) == 2);
    CHECK_FALSE(grid.bucket(999));
    CHECK_FALSE(grid.bucket(1900));
}

}  // TEST_SUITE("time")

TEST_SUITE("csv") {

TEST_CASE("splits fields including empty ones") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("a,,b,") == std::vector<std::string>{"a", "", "b", ""});
    CHECK(split_csv_line("") == std::vector<std::string>{""});
    CHECK(split_csv_line("x\ty", '\t') == std::vector<std::string>{"x", "y"});
}

TEST_CASE("trim strips surrounding whitespace only") {
    CHECK(trim("  a b  ") == "a b");
    CHECK(trim("\t x\r\n") == "x");
    CHECK(trim("") == "");
    CHECK(trim("   ") == "");
    CHECK(trim("solid") == "solid");
}

TEST_CASE("format_double round-trips exactly") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-30, 30);
    for (int i = 0; i < 2000; ++i) {
        double value = std::ldexp(mantissa(rng), exponent(rng));
        auto parsed = parse_double(format_double(value));
        REQUIRE(parsed);
        CHECK(*parsed == value);
    }
    CHECK(*parse_double(format_double(0.1)) == 0.1);
    CHECK(*parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("parse_double insists on full consumption") {
    CHECK(parse_double("1.5") == 1.5);
    CHECK(parse_double(" 2 ") == 2.0);
    CHECK(parse_double("-0.25") == -0.25);
    CHECK_FALSE(parse_double(""));
    CHECK_FALSE(parse_double("abc"));
    CHECK_FALSE(parse_double("1.5x"));
    CHECK_FALSE(parse_double("1.2.3"));
}

}  // TEST_SUITE("csv")

TEST_SUITE("series") {

TEST_CASE("gap bookkeeping") {
    UniformSeries s;
    s.values = {1.0, UniformSeries::gap(), 2.0, UniformSeries::gap()};
    CHECK(s.gap_count() == 2);
    CHECK(UniformSeries::is_gap(UniformSeries::gap()));
    CHECK_FALSE(UniformSeries::is_gap(0.0));
}

TEST_CASE("fill_gaps carries the previous value and backfills the head") {
    UniformSeries s;
    s.values = {UniformSeries::gap(), UniformSeries::gap(), 1.0, UniformSeries::gap(), 2.0};
    CHECK(fill_gaps(s) == 3);
    CHECK(s.values == std::vector<double>{1.0, 1.0, 1.0, 1.0, 2.0});
    CHECK(fill_gaps(s) == 0);  // already dense
}

TEST_CASE("fill_gaps leaves an all-gap series alone") {
    UniformSeries s;
    s.values.assign(4, UniformSeries::gap());
    CHECK(fill_gaps(s) == 0);
    CHECK(s.gap_count() == 4);
}

TEST_CASE("csv round-trip preserves values and gap positions") {
    oracles::TempDir dir("series");
    UniformSeries s;
    s.start = 1613088000;
    s.interval = 300;
    s.values = {12.25, UniformSeries::gap(), -3.5, 0.0, 1.0 / 3.0};

    const std::string path = dir.file("series.csv");
    write_series_csv(path, s);
    UniformSeries back = read_series_csv(path);

    CHECK(back.start == s.start);
    CHECK(back.interval == s.interval);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (UniformSeries::is_gap(s.values[i]))
            CHECK(UniformSeries::is_gap(back.values[i]));
        else
            CHECK(back.values[i] == s.values[i]);
    }
}

TEST_CASE("reader rejects rows off the uniform grid") {
    oracles::TempDir dir("series_bad");
    const std::string path = dir.file("bad.csv");
    {
        std::ofstream out(path);
        out << "timestamp,value\n";
        out << "2021-02-12T00:00:00Z,1\n";
        out << "2021-02-12T00:05:00Z,2\n";
        out << "2021-02-12T00:12:00Z,3\n";  // breaks the 5-minute spacing
    }
    CHECK_THROWS_AS(read_series_csv(path), std::runtime_error);
}

TEST_CASE("timestamps advance by the interval") {
    UniformSeries s;
    s.start = 100;
    s.interval = 60;
    s.values = {1.0, 2.0, 3.0};
    CHECK(s.timestamp(0) == 100);
    CHECK(s.timestamp(2) == 220);
}

}  // TEST_SUITE("series")
