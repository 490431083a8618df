#include "fearlab/volindex.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace fearlab {

namespace {

double years_from_minutes(double minutes) {
    return minutes / static_cast<double>(IndexParams::year_minutes);
}

// Q(K) per strike for the summation: put mid below K0, call mid above,
// average of both at K0. Entries without the needed mid drop out.
struct OtmEntry {
    double strike;
    double q;
};

std::vector<OtmEntry> otm_entries(const ExpirySlice& slice, double k0) {
    std::vector<OtmEntry> out;
    for (const auto& e : slice.entries) {
        std::optional<double> q;
        if (e.strike < k0) {
            q = e.put_mid;
        } else if (e.strike > k0) {
            q = e.call_mid;
        } else if (e.call_mid && e.put_mid) {
            q = 0.5 * (*e.call_mid + *e.put_mid);
        } else if (e.call_mid) {
            q = e.call_mid;
        } else {
            q = e.put_mid;
        }
        if (q && *q > 0.0) out.push_back({e.strike, *q});
    }
    return out;
}

// CBOE truncation: walking away from K0, stop after two consecutive
// missing/zero levels on the full strike ladder.
std::vector<OtmEntry> apply_zero_bid_truncation(const ExpirySlice& slice, double k0) {
    std::vector<const SliceEntry*> below, above;
    const SliceEntry* at_k0 = nullptr;
    for (const auto& e : slice.entries) {
        if (e.strike < k0) below.push_back(&e);
        else if (e.strike > k0) above.push_back(&e);
        else at_k0 = &e;
    }
    std::reverse(below.begin(), below.end());  // walk downward from K0

    std::vector<OtmEntry> out;
    if (at_k0) {
        auto both = otm_entries({slice.eval_time, slice.expiry, {*at_k0}}, k0);
        for (auto& o : both) out.push_back(o);
    }
    auto walk = [&](const std::vector<const SliceEntry*>& side, bool puts) {
        int consecutive_missing = 0;
        for (const SliceEntry* e : side) {
            const auto& mid = puts ? e->put_mid : e->call_mid;
            if (!mid || *mid <= 0.0) {
                if (++consecutive_missing >= 2) break;
                continue;
            }
            consecutive_missing = 0;
            out.push_back({e->strike, *mid});
        }
    };
    walk(below, /*puts=*/true);
    walk(above, /*puts=*/false);
    std::sort(out.begin(), out.end(),
              [](const OtmEntry& a, const OtmEntry& b) { return a.strike < b.strike; });
    return out;
}

void check_slice(const ExpirySlice& slice) {
    if (slice.expiry <= slice.eval_time)
        throw std::invalid_argument("slice expiry must be after eval time");
    for (std::size_t i = 1; i < slice.entries.size(); ++i) {
        if (!(slice.entries[i - 1].strike < slice.entries[i].strike))
            throw std::invalid_argument("slice strikes must be strictly increasing");
    }
}

struct InstrumentKey {
    UtcSeconds expiry;
    double strike;
    OptionSide side;
    bool operator<(const InstrumentKey& o) const {
        if (expiry != o.expiry) return expiry < o.expiry;
        if (strike != o.strike) return strike < o.strike;
        return static_cast<int>(side) < static_cast<int>(o.side);
    }
};

struct TimedQuote {
    UtcSeconds timestamp;
    double bid;
    double ask;
};

}  // namespace

ForwardResult forward_price(const ExpirySlice& slice, const IndexParams& params) {
    check_slice(slice);
    const double t_years = years_from_minutes(slice.minutes_to_expiry());

    const SliceEntry* best = nullptr;
    double best_diff = 0.0;
    for (const auto& e : slice.entries) {
        if (!e.call_mid || !e.put_mid) continue;
        double diff = std::abs(*e.call_mid - *e.put_mid);
        if (!best || diff < best_diff) {
            best = &e;
            best_diff = diff;
        }
    }
    if (!best) throw std::runtime_error("forward_price: no strike has both sides quoted");

    ForwardResult result;
    result.forward = best->strike +
                     std::exp(params.risk_free_rate * t_years) * (*best->call_mid - *best->put_mid);

    // Largest strike at or below F; a chain entirely above F degrades to the
    // smallest strike instead of aborting the whole series.
    result.k0 = slice.entries.front().strike;
    for (const auto& e : slice.entries) {
        if (e.strike <= result.forward) result.k0 = e.strike;
    }
    return result;
}

VarianceContribution variance_contribution(const ExpirySlice& slice, const IndexParams& params) {
    auto fwd = forward_price(slice, params);
    const double minutes = slice.minutes_to_expiry();
    const double t_years = years_from_minutes(minutes);

    auto entries = params.cboe_zero_bid_rule ? apply_zero_bid_truncation(slice, fwd.k0)
                                             : otm_entries(slice, fwd.k0);
    if (entries.empty())
        throw std::runtime_error(
            "variance_contribution: insufficient usable quotes (all OTM mids absent)");
    if (static_cast<int>(entries.size()) < params.min_quotes_per_expiry)
        throw std::runtime_error("variance_contribution: insufficient usable quotes (" +
                                 std::to_string(entries.size()) + " < " +
                                 std::to_string(params.min_quotes_per_expiry) + ")");

    const double discount = std::exp(params.risk_free_rate * t_years);
    double sum = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        double dk;
        if (entries.size() == 1) {
            dk = entries[i].strike;  // degenerate single-strike chain
        } else if (i == 0) {
            dk = entries[1].strike - entries[0].strike;
        } else if (i + 1 == entries.size()) {
            dk = entries[i].strike - entries[i - 1].strike;
        } else {
            dk = 0.5 * (entries[i + 1].strike - entries[i - 1].strike);
        }
        sum += dk / (entries[i].strike * entries[i].strike) * discount * entries[i].q;
    }

    const double skew = fwd.forward / fwd.k0 - 1.0;
    VarianceContribution out;
    out.sigma_sq = (2.0 / t_years) * sum - (1.0 / t_years) * skew * skew;
    out.years_to_expiry = t_years;
    out.minutes_to_expiry = minutes;
    out.forward = fwd.forward;
    out.k0 = fwd.k0;
    return out;
}

InterpolationResult interpolate_index(const VarianceContribution& near,
                                      const VarianceContribution& next,
                                      const IndexParams& params) {
    const double n1 = near.minutes_to_expiry;
    const double n2 = next.minutes_to_expiry;
    if (n1 <= 0.0 || n2 <= 0.0)
        throw std::invalid_argument("interpolate_index: maturities must be positive");
    if (n1 == n2) throw std::invalid_argument("interpolate_index: equal maturities");
    if (n1 > n2) throw std::invalid_argument("interpolate_index: near term after next term");

    const double n7 = static_cast<double>(params.target_maturity_minutes);
    const double w1 = (n2 - n7) / (n2 - n1);
    const double w2 = (n7 - n1) / (n2 - n1);
    const double term1 = near.years_to_expiry * near.sigma_sq * w1;
    const double term2 = next.years_to_expiry * next.sigma_sq * w2;
    const double blended = params.eq2_minus ? term1 - term2 : term1 + term2;
    const double radicand =
        blended * static_cast<double>(IndexParams::year_minutes) / n7;

    InterpolationResult result;
    if (radicand < 0.0) {
        result.vxbt = 0.0;
        result.clamped = true;
    } else {
        result.vxbt = 100.0 * std::sqrt(radicand);
    }
    return result;
}

VxbtSeriesResult compute_vxbt_series(const std::vector<OptionQuoteRecord>& quotes,
                                     const TimeGrid& grid, const IndexParams& params) {
    // One chronological vector per instrument; quotes arrive sorted, a
    // stable pass keeps each instrument's history sorted too.
    std::map<InstrumentKey, std::vector<TimedQuote>> book;
    std::set<UtcSeconds> friday_expiries;
    for (const auto& q : quotes) {
        book[{q.expiry, q.strike, q.side}].push_back({q.timestamp, q.bid, q.ask});
        if (is_friday_0800(q.expiry)) friday_expiries.insert(q.expiry);
    }
    for (auto& [key, series] : book) {
        std::stable_sort(series.begin(), series.end(),
                         [](const TimedQuote& a, const TimedQuote& b) {
                             return a.timestamp < b.timestamp;
                         });
    }

    const std::int64_t staleness = params.staleness_minutes * kSecondsPerMinute;

    // Latest quote at or before `when`, ignoring anything past the
    // staleness horizon. Zero-bid quotes contribute no midpoint.
    auto mid_at = [&](const std::vector<TimedQuote>& series,
                      UtcSeconds when) -> std::optional<double> {
        auto it = std::upper_bound(series.begin(), series.end(), when,
                                   [](UtcSeconds t, const TimedQuote& q) { return t < q.timestamp; });
        if (it == series.begin()) return std::nullopt;
        const TimedQuote& q = *std::prev(it);
        if (when - q.timestamp > staleness) return std::nullopt;
        if (q.bid <= 0.0) return std::nullopt;
        return 0.5 * (q.bid + q.ask);
    };

    auto build_slice = [&](UtcSeconds when, UtcSeconds expiry) {
        ExpirySlice slice;
        slice.eval_time = when;
        slice.expiry = expiry;
        std::map<double, SliceEntry> by_strike;
        for (const auto& [key, series] : book) {
            if (key.expiry != expiry) continue;
            auto mid = mid_at(series, when);
            if (!mid) continue;
            auto& entry = by_strike[key.strike];
            entry.strike = key.strike;
            if (key.side == OptionSide::Call)
                entry.call_mid = mid;
            else
                entry.put_mid = mid;
        }
        for (auto& [strike, entry] : by_strike) slice.entries.push_back(entry);
        return slice;
    };

    VxbtSeriesResult result;
    result.series.start = grid.start;
    result.series.interval = grid.interval;
    result.series.values.assign(grid.count, UniformSeries::gap());
    result.report.points = grid.count;

    for (std::size_t i = 0; i < grid.count; ++i) {
        const UtcSeconds when = grid.at(i);
        auto it = friday_expiries.upper_bound(when);
        if (it == friday_expiries.end() || std::next(it) == friday_expiries.end()) {
            ++result.report.gaps;
            continue;
        }
        const UtcSeconds near_expiry = *it;
        const UtcSeconds next_expiry = *std::next(it);
        try {
            auto near = variance_contribution(build_slice(when, near_expiry), params);
            auto next = variance_contribution(build_slice(when, next_expiry), params);
            auto interp = interpolate_index(near, next, params);
            result.series.values[i] = interp.vxbt;
            if (interp.clamped) ++result.report.clamped_radicands;
        } catch (const std::exception&) {
            ++result.report.gaps;
        }
    }
    return result;
}

void write_vxbt_report(const std::string& path, const VxbtReport& report) {
    nlohmann::json obj;
    obj["points"] = report.points;
    obj["gaps"] = report.gaps;
    obj["clamped_radicands"] = report.clamped_radicands;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << obj.dump(2) << '\n';
}

}  // namespace fearlab
