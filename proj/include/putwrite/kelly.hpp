#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace putwrite::kelly {

/// One Monte Carlo run of the underlying. Time step is horizon/steps in years
/// (252 trading days per year).
struct SimConfig {
  double spot = 0.0;
  double sigma = 0.0;
  double rate = 0.0;
  double dividend = 0.0;
  double horizon = 0.0;
  int steps = 1;
  int n_paths = 10'000;
  std::uint64_t seed = 0;
  /// Replaces r - q as the log-drift when set.
  std::optional<double> drift_override;

  void validate() const;
};

/// Win probability and conditional outcome sizes of a short put, in units
/// of the premium collected.
struct KellyInputs {
  double p = 0.0;
  std::optional<double> b;  // E[r | r > 0]; empty when no path wins
  std::optional<double> a;  // -E[r | r <= 0]; empty when no path loses
  std::int64_t n_win = 0;
  std::int64_t n_loss = 0;
  double mean_return = 0.0;
};

struct KellyFraction {
  double raw_f = 0.0;
  double clamped_f = 0.0;
  double f_max = 1.0;
};

/// Terminal prices of `n_paths` discretized GBM paths. Each path draws from
/// its own substream, so the output does not depend on evaluation order.
std::vector<double> simulate_terminal_prices(const SimConfig& cfg);

/// Short-put returns (P - V_T)/P per terminal price; V_T is the BSM put value
/// with `residual_tau` left (intrinsic at 0) under the config's sigma/r/q.
std::vector<double> short_put_returns(double premium, double strike, std::span<const double> terminal,
                                      const SimConfig& cfg, double residual_tau);

/// p, a, b from a sample of returns.
KellyInputs summarize_returns(std::span<const double> returns);

/// Simulates, values and summarizes in one call.
KellyInputs estimate_pab(double premium, double strike, const SimConfig& cfg, double residual_tau);

/// p ln(1 + b f) + (1 - p) ln(1 - f); requires 0 <= f < 1 and b > 0.
double kelly_growth(double f, double p, double b);

/// Binary-outcome optimum (b p - (1 - p)) / b. May be negative.
double kelly_fraction_binary(double p, double b);

/// p/a - (1-p)/b with the degenerate cases resolved: no winning paths -> 0,
/// no losing paths (or a == 0) -> f_max. Clamped into [0, f_max].
KellyFraction kelly_fraction_partial(const KellyInputs& in, double f_max = 1.0);

/// floor((PV / M) * f), never negative.
std::int64_t kelly_contracts(double portfolio_value, double margin, const KellyFraction& f);

}  // namespace putwrite::kelly
