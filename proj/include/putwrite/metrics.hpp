#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace putwrite::metrics {

inline constexpr double kTradingDays = 252.0;

/// r_i = (p_i - p_{i-1}) / p_{i-1}. Needs >= 2 strictly positive values.
std::vector<double> daily_returns(std::span<const double> equity);

/// (prod(1 + r_i))^(252/n) - 1.
double annualized_return(std::span<const double> returns, double periods_per_year = kTradingDays);

/// sqrt(252) times the sample standard deviation (divisor n-1).
double annualized_stdev(std::span<const double> returns, double periods_per_year = kTradingDays);

/// Largest (v_x - v_y) / v_x over x < y, floored at 0.
double max_drawdown(std::span<const double> equity);

struct LossDuration {
  int days = 0;
  double years = 0.0;
  /// The longest episode had not recovered by the last observation.
  bool open_drawdown = false;
};

/// Longest stretch from a running peak to the first value at or above it.
LossDuration max_loss_duration(std::span<const double> equity, double periods_per_year = kTradingDays);

struct Ratio {
  double value = 0.0;
  /// aSD == 0 with aRC != 0; `value` then carries +/-infinity.
  bool unbounded = false;
};

Ratio information_ratio(double arc, double asd);

struct TailRisk {
  double var = 0.0;   // positive = loss
  double cvar = 0.0;  // positive = loss
};

/// Historical VaR from the ceil(alpha*n)-th smallest return and the mean of
/// all returns at or below it.
TailRisk var_cvar(std::span<const double> returns, double alpha = 0.05);

/// Per-period Sharpe ratio mean / sample stdev (no annualization).
std::optional<double> sharpe_ratio(std::span<const double> returns);

/// Population skewness m3 / m2^1.5 and raw (non-excess) kurtosis m4 / m2^2.
struct Moments {
  double mean = 0.0;
  std::optional<double> skew;
  std::optional<double> kurtosis;
};

Moments moments(std::span<const double> returns);

struct SharpeTest {
  bool defined = false;
  double sharpe = 0.0;
  double statistic = 0.0;
  double probability = 0.0;
};

/// Probability that the true per-period Sharpe exceeds `benchmark_sharpe`,
/// adjusted for skewness and kurtosis. Needs n >= 4.
SharpeTest probabilistic_sharpe(std::span<const double> returns, double benchmark_sharpe);

/// "", "*", "**", "***" for probability >= 0.90 / 0.95 / 0.99.
std::string significance_stars(const SharpeTest& test);

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double stdev = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double p10 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  std::optional<double> skew;
  std::optional<double> kurtosis;  // raw
};

/// Percentiles interpolate linearly between order statistics.
SummaryStats summary_stats(std::span<const double> returns);

double percentile(std::span<const double> sorted, double pct);

struct MetricsReport {
  std::size_t n_returns = 0;
  double arc = 0.0;
  double asd = 0.0;
  double md = 0.0;
  LossDuration mld;
  Ratio ir;
  TailRisk tail;
  std::optional<double> skew;
  std::optional<double> kurtosis;
  double benchmark_sharpe = 0.0;
  SharpeTest psr;
};

MetricsReport evaluate(std::span<const double> equity, double benchmark_sharpe);

}  // namespace putwrite::metrics
