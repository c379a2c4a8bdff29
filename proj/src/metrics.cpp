#include "putwrite/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "putwrite/pricing.hpp"

namespace putwrite::metrics {

std::vector<double> daily_returns(std::span<const double> equity) {
  if (equity.size() < 2) throw std::invalid_argument("daily_returns: need at least two equity values");
  for (double v : equity) {
    if (!(v > 0)) throw std::invalid_argument("daily_returns: equity must be strictly positive");
  }
  std::vector<double> r(equity.size() - 1);
  for (std::size_t i = 1; i < equity.size(); ++i) r[i - 1] = (equity[i] - equity[i - 1]) / equity[i - 1];
  return r;
}

double annualized_return(std::span<const double> returns, double periods_per_year) {
  if (returns.empty()) throw std::invalid_argument("annualized_return: empty series");
  double log_growth = 0.0;
  for (double r : returns) {
    if (!(r > -1.0)) throw std::invalid_argument("annualized_return: return <= -100%");
    log_growth += std::log1p(r);
  }
  return std::expm1(log_growth * periods_per_year / static_cast<double>(returns.size()));
}

double annualized_stdev(std::span<const double> returns, double periods_per_year) {
  if (returns.size() < 2) throw std::invalid_argument("annualized_stdev: need n >= 2");
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  return std::sqrt(periods_per_year) * std::sqrt(ss / static_cast<double>(returns.size() - 1));
}

double max_drawdown(std::span<const double> equity) {
  double peak = -std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double v : equity) {
    if (!(v > 0)) throw std::invalid_argument("max_drawdown: equity must be strictly positive");
    peak = std::max(peak, v);
    worst = std::max(worst, (peak - v) / peak);
  }
  return worst;
}

LossDuration max_loss_duration(std::span<const double> equity, double periods_per_year) {
  LossDuration out;
  if (equity.empty()) return out;
  std::size_t peak_index = 0;
  bool underwater = false;
  int longest_closed = 0;
  for (std::size_t i = 1; i < equity.size(); ++i) {
    if (equity[i] >= equity[peak_index]) {
      if (underwater) longest_closed = std::max(longest_closed, static_cast<int>(i - peak_index));
      underwater = false;
      peak_index = i;
    } else {
      underwater = true;
    }
  }
  const int trailing = underwater ? static_cast<int>(equity.size() - 1 - peak_index) : 0;
  out.open_drawdown = trailing > longest_closed;
  out.days = std::max(trailing, longest_closed);
  out.years = out.days / periods_per_year;
  return out;
}

Ratio information_ratio(double arc, double asd) {
  if (!(asd >= 0)) throw std::invalid_argument("information_ratio: negative stdev");
  if (asd > 0) return Ratio{arc / asd, false};
  if (arc == 0.0) return Ratio{0.0, false};
  return Ratio{std::copysign(std::numeric_limits<double>::infinity(), arc), true};
}

TailRisk var_cvar(std::span<const double> returns, double alpha) {
  if (returns.empty()) throw std::invalid_argument("var_cvar: empty series");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("var_cvar: alpha must lie in (0, 1)");
  std::vector<double> sorted(returns.begin(), returns.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // alpha*n is often an integer up to rounding noise; do not let 1e-16 push it up a rank
  auto k = static_cast<std::size_t>(std::ceil(alpha * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  const double quantile = sorted[k - 1];
  double sum = 0.0;
  std::size_t count = 0;
  for (double r : sorted) {
    if (r > quantile) break;
    sum += r;
    ++count;
  }
  return TailRisk{-quantile, -sum / static_cast<double>(count)};
}

std::optional<double> sharpe_ratio(std::span<const double> returns) {
  if (returns.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / static_cast<double>(returns.size() - 1));
  if (!(sd > 1e-14 * std::abs(mean)) || sd == 0.0) return std::nullopt;
  return mean / sd;
}

Moments moments(std::span<const double> returns) {
  Moments out;
  if (returns.empty()) return out;
  const double n = static_cast<double>(returns.size());
  for (double r : returns) out.mean += r;
  out.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double r : returns) {
    const double d = r - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  // relative threshold: a constant series leaves rounding-level m2
  if (m2 > 1e-28 * std::max(1.0, out.mean * out.mean)) {
    out.skew = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
  }
  return out;
}

SharpeTest probabilistic_sharpe(std::span<const double> returns, double benchmark_sharpe) {
  SharpeTest out;
  if (returns.size() < 4) return out;
  const auto sr = sharpe_ratio(returns);
  const auto m = moments(returns);
  if (!sr || !m.skew || !m.kurtosis) return out;
  const double radicand = 1.0 - *m.skew * *sr + (*m.kurtosis - 1.0) / 4.0 * *sr * *sr;
  out.sharpe = *sr;
  if (!(radicand > 0)) return out;
  out.statistic = (*sr - benchmark_sharpe) * std::sqrt(static_cast<double>(returns.size() - 1)) / std::sqrt(radicand);
  out.probability = pricing::normal_cdf(out.statistic);
  out.defined = true;
  return out;
}

std::string significance_stars(const SharpeTest& test) {
  if (!test.defined) return "";
  if (test.probability >= 0.99) return "***";
  if (test.probability >= 0.95) return "**";
  if (test.probability >= 0.90) return "*";
  return "";
}

double percentile(std::span<const double> sorted, double pct) {
  if (sorted.empty()) throw std::invalid_argument("percentile: empty series");
  const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

SummaryStats summary_stats(std::span<const double> returns) {
  if (returns.size() < 2) throw std::invalid_argument("summary_stats: need n >= 2");
  SummaryStats s;
  s.n = returns.size();
  std::vector<double> sorted(returns.begin(), returns.end());
  std::sort(sorted.begin(), sorted.end());
  const auto m = moments(returns);
  s.mean = m.mean;
  double ss = 0.0;
  for (double r : returns) ss += (r - s.mean) * (r - s.mean);
  s.variance = ss / static_cast<double>(s.n - 1);
  s.stdev = std::sqrt(s.variance);
  s.min = sorted.front();
  s.max = sorted.back();
  s.p10 = percentile(sorted, 10);
  s.p25 = percentile(sorted, 25);
  s.p50 = percentile(sorted, 50);
  s.p75 = percentile(sorted, 75);
  s.p90 = percentile(sorted, 90);
  s.skew = m.skew;
  s.kurtosis = m.kurtosis;
  return s;
}

MetricsReport evaluate(std::span<const double> equity, double benchmark_sharpe) {
  const auto r = daily_returns(equity);
  MetricsReport out;
  out.n_returns = r.size();
  out.arc = annualized_return(r);
  out.asd = r.size() >= 2 ? annualized_stdev(r) : 0.0;
  out.md = max_drawdown(equity);
  out.mld = max_loss_duration(equity);
  out.ir = information_ratio(out.arc, out.asd);
  out.tail = var_cvar(r);
  const auto m = moments(r);
  out.skew = m.skew;
  out.kurtosis = m.kurtosis;
  out.benchmark_sharpe = benchmark_sharpe;
  out.psr = probabilistic_sharpe(r, benchmark_sharpe);
  return out;
}

}  // namespace putwrite::metrics
