#pragma once

#include <span>

namespace putwrite::pricing {

/// Inputs of a European option valuation. Rates, yield and volatility are
/// annualized; `tau` is in years.
struct PricingInputs {
  double spot = 0.0;
  double strike = 0.0;
  double rate = 0.0;
  double dividend = 0.0;
  double sigma = 0.0;
  double tau = 0.0;

  void validate() const;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Black-Scholes-Merton put with continuous dividend yield. Exact branches
/// for tau == 0 (intrinsic) and sigma == 0 (discounted forward intrinsic).
double bsm_put_price(const PricingInputs& in);
double bsm_call_price(const PricingInputs& in);

/// Discounted strike minus spot; negative for out-of-the-money puts.
double put_moneyness(double spot, double strike, double rate, double tau);

/// Strike on the `grid` whose moneyness is closest to -(target_otm_pct/100)*spot.
/// Ties go to the lower strike. Throws if no listed strike lies on the grid.
double select_strike(std::span<const double> strikes, double spot, double rate, double tau,
                     double target_otm_pct, double grid = 25.0);

bool on_strike_grid(double strike, double grid);

/// Per-contract short put margin, currency units:
/// (P + max(0.15 S - max(0, K - S), 0.10 S)) * 100.
double put_margin(double premium, double spot, double strike);

}  // namespace putwrite::pricing
