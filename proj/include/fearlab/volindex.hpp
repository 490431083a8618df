#pragma once

#include "fearlab/market_data.hpp"
#include "fearlab/series.hpp"
#include "fearlab/time_utils.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fearlab {

struct SliceEntry {
    double strike = 0.0;
    std::optional<double> call_mid;
    std::optional<double> put_mid;
};

// All usable quotes for one expiry at one evaluation instant. Strikes must
// be strictly increasing.
struct ExpirySlice {
    UtcSeconds eval_time = 0;
    UtcSeconds expiry = 0;
    std::vector<SliceEntry> entries;

    double minutes_to_expiry() const {
        return static_cast<double>(expiry - eval_time) / kSecondsPerMinute;
    }
};

struct VarianceContribution {
    double sigma_sq = 0.0;          // annualised variance
    double years_to_expiry = 0.0;   // T
    double minutes_to_expiry = 0.0; // N_T
    double forward = 0.0;           // F
    double k0 = 0.0;                // strike at or immediately below F
};

struct IndexParams {
    double risk_free_rate = 0.0;                 // R, per year
    std::int64_t target_maturity_minutes = 7 * 1440;  // N_7
    static constexpr std::int64_t year_minutes = 525600;  // N_365
    int min_quotes_per_expiry = 2;               // usable OTM entries required
    std::int64_t staleness_minutes = 60;         // quotes older than this never enter a slice
    // The printed interpolation formula subtracts the far-term contribution;
    // the CBOE method it follows adds it. Default is the additive form, the
    // flag reproduces the printed one for auditability.
    bool eq2_minus = false;
    // CBOE truncation: stop including strikes beyond two consecutive
    // zero-bid levels. Off by default.
    bool cboe_zero_bid_rule = false;
};

struct ForwardResult {
    double forward = 0.0;
    double k0 = 0.0;
};

struct InterpolationResult {
    double vxbt = 0.0;
    bool clamped = false;  // radicand was negative and got clamped to zero
};

struct VxbtReport {
    std::size_t points = 0;
    std::size_t gaps = 0;
    std::size_t clamped_radicands = 0;
};

struct VxbtSeriesResult {
    UniformSeries series;
    VxbtReport report;
};

// F from put-call parity at the strike with minimal |call - put|;
// K0 is the largest strike at or below F (smallest strike when F sits
// below the whole chain). Throws when no strike has both sides quoted.
ForwardResult forward_price(const ExpirySlice& slice, const IndexParams& params);

// Annualised variance of one expiry: (2/T) sum dK/K^2 e^{RT} Q(K)
// minus (1/T) (F/K0 - 1)^2, out-of-the-money midpoints only.
VarianceContribution variance_contribution(const ExpirySlice& slice, const IndexParams& params);

// Blends near- and next-term contributions to the 7-day maturity and scales
// to vol points. Throws when both terms share the same maturity.
InterpolationResult interpolate_index(const VarianceContribution& near,
                                      const VarianceContribution& next,
                                      const IndexParams& params);

// One index value per grid instant from the two nearest Friday expiries
// strictly after it. Per-point failures become gaps, never aborts.
VxbtSeriesResult compute_vxbt_series(const std::vector<OptionQuoteRecord>& quotes,
                                     const TimeGrid& grid, const IndexParams& params);

void write_vxbt_report(const std::string& path, const VxbtReport& report);

}  // namespace fearlab
