#include "putwrite/vol_estimators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace putwrite::vol {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::span<const DailyBar> tail(std::span<const DailyBar> bars, std::size_t n, const char* who) {
  if (bars.size() < n) throw std::invalid_argument(std::string(who) + ": insufficient history");
  for (const auto& b : bars.last(n)) {
    if (!(b.open > 0 && b.high > 0 && b.low > 0 && b.close > 0)) {
      throw std::invalid_argument(std::string(who) + ": nonpositive price");
    }
  }
  return bars.last(n);
}

/// Two-pass sample variance, divisor n-1.
double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::CloseToClose: return "c2c";
    case Estimator::GarmanKlass: return "gk";
    case Estimator::YangZhang: return "yz";
  }
  return "?";
}

Estimator parse_estimator(std::string_view text) {
  if (text == "c2c" || text == "hv" || text == "C2C" || text == "HV") return Estimator::CloseToClose;
  if (text == "gk" || text == "GK") return Estimator::GarmanKlass;
  if (text == "yz" || text == "YZ") return Estimator::YangZhang;
  throw std::invalid_argument("unknown estimator '" + std::string(text) + "'");
}

double c2c_variance(std::span<const double> closes, int T) {
  require(T >= 2, "c2c_variance: T must be >= 2");
  const auto n = static_cast<std::size_t>(T);
  if (closes.size() < n + 1) throw std::invalid_argument("c2c_variance: insufficient history");
  const auto window = closes.last(n + 1);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(window[i] > 0 && window[i + 1] > 0, "c2c_variance: nonpositive price");
    r[i] = std::log(window[i + 1] / window[i]);
  }
  return sample_variance(r);
}

double c2c_variance(std::span<const DailyBar> bars, int T) {
  require(T >= 2, "c2c_variance: T must be >= 2");
  const auto window = tail(bars, static_cast<std::size_t>(T) + 1, "c2c_variance");
  std::vector<double> closes;
  closes.reserve(window.size());
  for (const auto& b : window) closes.push_back(b.close);
  return c2c_variance(closes, T);
}

double gk_variance(std::span<const DailyBar> bars, int T) {
  require(T >= 1, "gk_variance: T must be >= 1");
  const double c = 2.0 * std::numbers::ln2 - 1.0;
  double sum = 0.0;
  for (const auto& b : tail(bars, static_cast<std::size_t>(T), "gk_variance")) {
    const double hl = std::log(b.high / b.low);
    const double co = std::log(b.close / b.open);
    sum += 0.5 * hl * hl - c * co * co;
  }
  return sum / T;
}

double rs_variance(std::span<const DailyBar> bars, int T) {
  require(T >= 1, "rs_variance: T must be >= 1");
  double sum = 0.0;
  for (const auto& b : tail(bars, static_cast<std::size_t>(T), "rs_variance")) {
    sum += std::log(b.high / b.close) * std::log(b.high / b.open) +
           std::log(b.low / b.close) * std::log(b.low / b.open);
  }
  return sum / T;
}

double overnight_variance(std::span<const DailyBar> bars, int T) {
  require(T >= 2, "overnight_variance: T must be >= 2");
  const auto window = tail(bars, static_cast<std::size_t>(T) + 1, "overnight_variance");
  std::vector<double> r(static_cast<std::size_t>(T));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::log(window[i + 1].open / window[i].close);
  return sample_variance(r);
}

double yz_weight(int T) {
  require(T >= 2, "yz_weight: T must be >= 2");
  return 0.34 / (1.34 + static_cast<double>(T + 1) / static_cast<double>(T - 1));
}

double yz_variance(std::span<const DailyBar> bars, int T) {
  const double k = yz_weight(T);
  return overnight_variance(bars, T) + k * c2c_variance(bars, T) + (1.0 - k) * rs_variance(bars, T);
}

int required_history(const EstimatorChoice& choice) {
  return choice.kind == Estimator::GarmanKlass ? choice.memory : choice.memory + 1;
}

VolEstimate annualize(double variance_per_period, double periods_per_year) {
  if (std::isnan(variance_per_period)) throw std::invalid_argument("annualize: NaN variance");
  require(periods_per_year > 0, "annualize: periods_per_year must be positive");
  VolEstimate out;
  out.periods_per_year = periods_per_year;
  out.clamped = variance_per_period < 0.0;
  out.variance_per_period = out.clamped ? 0.0 : variance_per_period;
  out.annualized_sigma = std::sqrt(out.variance_per_period * periods_per_year);
  return out;
}

VolEstimate estimate(const EstimatorChoice& choice, std::span<const DailyBar> history, double periods_per_year) {
  switch (choice.kind) {
    case Estimator::CloseToClose: return annualize(c2c_variance(history, choice.memory), periods_per_year);
    case Estimator::GarmanKlass: return annualize(gk_variance(history, choice.memory), periods_per_year);
    case Estimator::YangZhang: return annualize(yz_variance(history, choice.memory), periods_per_year);
  }
  throw std::invalid_argument("estimate: unknown estimator");
}

}  // namespace putwrite::vol
