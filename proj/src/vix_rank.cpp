#include "putwrite/vix_rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace putwrite::vix {

namespace {

void check_sizing(double portfolio_value, double margin) {
  if (!(margin > 0)) throw std::invalid_argument("contracts: margin must be positive");
  if (!(portfolio_value >= 0)) throw std::invalid_argument("contracts: portfolio value must be nonnegative");
}

std::int64_t floor_count(double x) { return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(x))); }

}  // namespace

double percentile_rank(double x, std::span<const double> window) {
  if (window.empty()) throw std::invalid_argument("percentile_rank: empty window");
  std::vector<double> sorted(window.begin(), window.end());
  std::sort(sorted.begin(), sorted.end());

  double position_sum = 0.0;
  std::size_t occurrences = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] == x) {
      position_sum += static_cast<double>(i + 1);
      ++occurrences;
    }
  }
  if (occurrences == 0) throw std::invalid_argument("percentile_rank: value is not in the window");
  const double W = static_cast<double>(sorted.size());
  // integer-valued operands keep the extremes exact (max -> 100)
  return 100.0 * position_sum / (W * static_cast<double>(occurrences));
}

double regime_factor(double rank) {
  if (!(rank >= 0 && rank <= 100)) throw std::invalid_argument("regime_factor: rank must lie in [0, 100]");
  return 1.0 - rank / 100.0;
}

std::int64_t vix_rank_contracts(double portfolio_value, double margin, double rank) {
  check_sizing(portfolio_value, margin);
  return floor_count((portfolio_value / margin) * regime_factor(rank));
}

std::int64_t vix_rank_contracts(double portfolio_value, double margin, double vix_now,
                                std::span<const double> window) {
  return vix_rank_contracts(portfolio_value, margin, percentile_rank(vix_now, window));
}

std::int64_t hybrid_contracts(double portfolio_value, double margin, const kelly::KellyFraction& f, double rank) {
  check_sizing(portfolio_value, margin);
  return floor_count(((portfolio_value / margin) * f.clamped_f) * regime_factor(rank));
}

std::int64_t hybrid_contracts(double portfolio_value, double margin, const kelly::KellyFraction& f, double vix_now,
                              std::span<const double> window) {
  return hybrid_contracts(portfolio_value, margin, f, percentile_rank(vix_now, window));
}

}  // namespace putwrite::vix
