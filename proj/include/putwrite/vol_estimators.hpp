#pragma once

#include <span>
#include <string>
#include <string_view>

#include "putwrite/market_data.hpp"

namespace putwrite::vol {

using market::DailyBar;

enum class Estimator { CloseToClose, GarmanKlass, YangZhang };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view text);

struct EstimatorChoice {
  Estimator kind = Estimator::CloseToClose;
  int memory = 21;  // lookback T in trading days

  bool operator==(const EstimatorChoice&) const = default;
};

struct VolEstimate {
  double variance_per_period = 0.0;
  double periods_per_year = 252.0;
  double annualized_sigma = 0.0;
  bool clamped = false;  // the raw variance was negative and was floored at 0
};

// All estimators read the trailing end of their input: the last T (or T+1)
// observations. Callers pass history that excludes the decision day.

/// Sample variance (divisor T-1) of the last T log close-to-close returns.
/// Needs T >= 2 and at least T+1 closes.
double c2c_variance(std::span<const double> closes, int T);
double c2c_variance(std::span<const DailyBar> bars, int T);

/// Mean over the last T days of 0.5*ln(H/L)^2 - (2 ln 2 - 1)*ln(C/O)^2.
double gk_variance(std::span<const DailyBar> bars, int T);

/// Mean over the last T days of ln(H/C)ln(H/O) + ln(L/C)ln(L/O).
double rs_variance(std::span<const DailyBar> bars, int T);

/// Sample variance (divisor T-1) of the last T overnight returns ln(O_t/C_{t-1}).
double overnight_variance(std::span<const DailyBar> bars, int T);

/// k = 0.34 / (1.34 + (T+1)/(T-1)).
double yz_weight(int T);

/// overnight + k * close-to-close + (1-k) * Rogers-Satchell on one window.
double yz_variance(std::span<const DailyBar> bars, int T);

/// Bars of history `estimate()` needs for a choice.
int required_history(const EstimatorChoice& choice);

VolEstimate annualize(double variance_per_period, double periods_per_year = 252.0);

VolEstimate estimate(const EstimatorChoice& choice, std::span<const DailyBar> history,
                     double periods_per_year = 252.0);

}  // namespace putwrite::vol
