#pragma once

#include <cstdint>
#include <span>

#include "putwrite/kelly.hpp"

namespace putwrite::vix {

/// Percentile rank in [0, 100] of `x` within `window` (W values, x among
/// them): 100 / (W k) times the sum of the k one-based ascending-sort
/// positions occupied by x.
double percentile_rank(double x, std::span<const double> window);

/// Sizing factor 1 - rank/100; the rank is normalized to [0, 1] first.
double regime_factor(double rank);

/// floor((PV / M) * (1 - rank/100)).
std::int64_t vix_rank_contracts(double portfolio_value, double margin, double rank);
std::int64_t vix_rank_contracts(double portfolio_value, double margin, double vix_now, std::span<const double> window);

/// floor((PV / M) * f * (1 - rank/100)).
std::int64_t hybrid_contracts(double portfolio_value, double margin, const kelly::KellyFraction& f, double rank);
std::int64_t hybrid_contracts(double portfolio_value, double margin, const kelly::KellyFraction& f, double vix_now,
                              std::span<const double> window);

}  // namespace putwrite::vix
