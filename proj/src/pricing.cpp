#include "putwrite/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace putwrite::pricing {

void PricingInputs::validate() const {
  if (!(spot > 0) || !(strike > 0)) throw std::invalid_argument("pricing: spot and strike must be positive");
  if (!(sigma >= 0) || !(tau >= 0)) throw std::invalid_argument("pricing: sigma and tau must be nonnegative");
  if (!std::isfinite(rate) || !std::isfinite(dividend)) throw std::invalid_argument("pricing: rates must be finite");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bsm_put_price(const PricingInputs& in) {
  in.validate();
  if (in.tau == 0.0) return std::max(in.strike - in.spot, 0.0);
  const double df_r = std::exp(-in.rate * in.tau);
  const double df_q = std::exp(-in.dividend * in.tau);
  if (in.sigma == 0.0) return std::max(in.strike * df_r - in.spot * df_q, 0.0);

  const double vol_sqrt_t = in.sigma * std::sqrt(in.tau);
  const double d1 =
      (std::log(in.spot / in.strike) + (in.rate - in.dividend + 0.5 * in.sigma * in.sigma) * in.tau) / vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  const double value = in.strike * df_r * normal_cdf(-d2) - in.spot * df_q * normal_cdf(-d1);
  return std::max(value, 0.0);
}

double bsm_call_price(const PricingInputs& in) {
  in.validate();
  if (in.tau == 0.0) return std::max(in.spot - in.strike, 0.0);
  const double df_r = std::exp(-in.rate * in.tau);
  const double df_q = std::exp(-in.dividend * in.tau);
  if (in.sigma == 0.0) return std::max(in.spot * df_q - in.strike * df_r, 0.0);

  const double vol_sqrt_t = in.sigma * std::sqrt(in.tau);
  const double d1 =
      (std::log(in.spot / in.strike) + (in.rate - in.dividend + 0.5 * in.sigma * in.sigma) * in.tau) / vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  return in.spot * df_q * normal_cdf(d1) - in.strike * df_r * normal_cdf(d2);
}

double put_moneyness(double spot, double strike, double rate, double tau) {
  return strike * std::exp(-rate * tau) - spot;
}

bool on_strike_grid(double strike, double grid) {
  if (!(grid > 0)) return true;
  const double ratio = strike / grid;
  return std::abs(ratio - std::round(ratio)) < 1e-9;
}

double select_strike(std::span<const double> strikes, double spot, double rate, double tau, double target_otm_pct,
                     double grid) {
  if (!(target_otm_pct >= 0)) throw std::invalid_argument("select_strike: target_otm_pct must be nonnegative");
  const double target = -(target_otm_pct / 100.0) * spot;

  std::vector<double> sorted(strikes.begin(), strikes.end());
  std::sort(sorted.begin(), sorted.end());

  std::optional<double> best;
  double best_distance = 0.0;
  for (double k : sorted) {
    if (!on_strike_grid(k, grid)) continue;
    const double distance = std::abs(put_moneyness(spot, k, rate, tau) - target);
    // strict comparison over ascending strikes keeps the lower strike on ties
    if (!best || distance < best_distance) {
      best = k;
      best_distance = distance;
    }
  }
  if (!best) throw std::invalid_argument("select_strike: no strike on the grid");
  return *best;
}

double put_margin(double premium, double spot, double strike) {
  if (!(premium >= 0) || !(spot > 0) || !(strike > 0)) {
    throw std::invalid_argument("put_margin: require P >= 0, S > 0, K > 0");
  }
  const double itm = std::max(0.0, strike - spot);
  return (premium + std::max(0.15 * spot - itm, 0.10 * spot)) * 100.0;
}

}  // namespace putwrite::pricing
