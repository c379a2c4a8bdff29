#include "putwrite/kelly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "putwrite/pricing.hpp"
#include "putwrite/rng.hpp"

namespace putwrite::kelly {

void SimConfig::validate() const {
  if (!(spot > 0)) throw std::invalid_argument("SimConfig: spot must be positive");
  if (!(sigma >= 0)) throw std::invalid_argument("SimConfig: sigma must be nonnegative");
  if (!(horizon >= 0)) throw std::invalid_argument("SimConfig: horizon must be nonnegative");
  if (steps < 1 || n_paths < 1) throw std::invalid_argument("SimConfig: steps and n_paths must be >= 1");
}

std::vector<double> simulate_terminal_prices(const SimConfig& cfg) {
  cfg.validate();
  const double dt = cfg.horizon / cfg.steps;
  const double mu = cfg.drift_override.value_or(cfg.rate - cfg.dividend);
  const double step_drift = (mu - 0.5 * cfg.sigma * cfg.sigma) * dt;
  const double step_vol = cfg.sigma * std::sqrt(dt);

  std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    double log_return = 0.0;
    for (int s = 0; s < cfg.steps; ++s) {
      log_return += step_drift + (step_vol > 0 ? step_vol * rng.normal() : 0.0);
    }
    out[i] = cfg.spot * std::exp(log_return);
  }
  return out;
}

std::vector<double> short_put_returns(double premium, double strike, std::span<const double> terminal,
                                      const SimConfig& cfg, double residual_tau) {
  if (!(premium > 0)) throw std::invalid_argument("short_put_returns: premium must be positive");
  if (!(residual_tau >= 0)) throw std::invalid_argument("short_put_returns: residual_tau must be nonnegative");
  std::vector<double> r(terminal.size());
  for (std::size_t i = 0; i < terminal.size(); ++i) {
    const double value =
        residual_tau == 0.0
            ? std::max(strike - terminal[i], 0.0)
            : pricing::bsm_put_price({terminal[i], strike, cfg.rate, cfg.dividend, cfg.sigma, residual_tau});
    r[i] = (premium - value) / premium;
  }
  return r;
}

KellyInputs summarize_returns(std::span<const double> returns) {
  if (returns.empty()) throw std::invalid_argument("summarize_returns: empty sample");
  KellyInputs out;
  double gains = 0.0;
  double losses = 0.0;
  for (double r : returns) {
    if (r > 0) {
      gains += r;
      ++out.n_win;
    } else {
      losses += r;
      ++out.n_loss;
    }
  }
  const double n = static_cast<double>(returns.size());
  out.p = static_cast<double>(out.n_win) / n;
  if (out.n_win > 0) out.b = gains / static_cast<double>(out.n_win);
  if (out.n_loss > 0) out.a = -losses / static_cast<double>(out.n_loss);
  out.mean_return = (gains + losses) / n;
  return out;
}

KellyInputs estimate_pab(double premium, double strike, const SimConfig& cfg, double residual_tau) {
  if (!(premium > 0)) throw std::invalid_argument("estimate_pab: premium must be positive");
  const auto terminal = simulate_terminal_prices(cfg);
  const auto returns = short_put_returns(premium, strike, terminal, cfg, residual_tau);
  return summarize_returns(returns);
}

double kelly_growth(double f, double p, double b) {
  if (!(f >= 0) || !(f < 1)) throw std::domain_error("kelly_growth: f must lie in [0, 1)");
  if (!(b > 0)) throw std::domain_error("kelly_growth: b must be positive");
  return p * std::log1p(b * f) + (1.0 - p) * std::log1p(-f);
}

double kelly_fraction_binary(double p, double b) {
  if (!(b > 0)) throw std::invalid_argument("kelly_fraction_binary: b must be positive");
  return (b * p - (1.0 - p)) / b;
}

KellyFraction kelly_fraction_partial(const KellyInputs& in, double f_max) {
  if (!(f_max >= 0)) throw std::invalid_argument("kelly_fraction_partial: f_max must be nonnegative");
  KellyFraction out;
  out.f_max = f_max;
  if (!in.b) {
    out.raw_f = 0.0;
  } else if (!in.a || *in.a <= 0.0) {
    out.raw_f = f_max;
  } else {
    out.raw_f = in.p / *in.a - (1.0 - in.p) / *in.b;
  }
  out.clamped_f = std::min(std::max(out.raw_f, 0.0), f_max);
  return out;
}

std::int64_t kelly_contracts(double portfolio_value, double margin, const KellyFraction& f) {
  if (!(margin > 0)) throw std::invalid_argument("kelly_contracts: margin must be positive");
  if (!(portfolio_value >= 0)) throw std::invalid_argument("kelly_contracts: portfolio value must be nonnegative");
  const double q = std::floor((portfolio_value / margin) * f.clamped_f);
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(q));
}

}  // namespace putwrite::kelly
