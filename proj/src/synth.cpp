#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "putwrite/market_data.hpp"
#include "putwrite/pricing.hpp"
#include "putwrite/rng.hpp"

namespace putwrite::market {

namespace {

constexpr std::uint64_t kIndexStream = 1;
constexpr std::uint64_t kImpliedVolStream = 2;
constexpr double kDaysPerYear = 252.0;

}  // namespace

void SynthSpec::validate() const {
  if (n_days < 1) throw std::invalid_argument("synth: n_days must be >= 1");
  if (bars_per_day < 1 || substeps < 1) throw std::invalid_argument("synth: bars_per_day and substeps must be >= 1");
  const auto session_minutes = (session.close - session.open).count();
  if (session_minutes <= 0 || session_minutes % bars_per_day != 0) {
    throw std::invalid_argument("synth: bars_per_day must divide the session length in minutes");
  }
  if (!(spot > 0)) throw std::invalid_argument("synth: spot must be positive");
  if (!(sigma >= 0)) throw std::invalid_argument("synth: sigma must be nonnegative");
  if (!(implied_vol > 0)) throw std::invalid_argument("synth: implied_vol must be positive");
  if (!(iv_vol_of_vol >= 0) || !(iv_mean_reversion >= 0) || iv_mean_reversion > 1) {
    throw std::invalid_argument("synth: invalid implied-vol dynamics");
  }
  if (!(overnight_fraction >= 0 && overnight_fraction <= 1)) {
    throw std::invalid_argument("synth: overnight_fraction must lie in [0, 1]");
  }
  if (!(spread_fraction >= 0)) throw std::invalid_argument("synth: negative spread fraction");
  if (!(index_half_spread >= 0)) throw std::invalid_argument("synth: negative index spread");
  if (expiry_ladder.empty()) throw std::invalid_argument("synth: empty expiry ladder");
  if (std::any_of(expiry_ladder.begin(), expiry_ladder.end(), [](int k) { return k < 0; })) {
    throw std::invalid_argument("synth: expiry ladder entries must be >= 0");
  }
  if (!(strike_grid > 0) || !(strike_range >= 0)) throw std::invalid_argument("synth: invalid strike grid");
  if (quote_offsets.empty()) throw std::invalid_argument("synth: no quote times");
  const auto bar_minutes = session_minutes / bars_per_day;
  for (int o : quote_offsets) {
    if (o < 0 || o > session_minutes || o % bar_minutes != 0) {
      throw std::invalid_argument("synth: quote offset " + std::to_string(o) + " is not on a bar boundary");
    }
  }
}

MarketDataset synthesize_market(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();

  MarketDataset data;
  data.underlying = spec.underlying;
  data.strike_grid = spec.strike_grid;
  data.session = spec.session;
  data.calendar = TradingCalendar::weekdays(spec.start, static_cast<std::size_t>(spec.n_days)).days();

  const auto session_minutes = (spec.session.close - spec.session.open).count();
  const std::chrono::minutes bar_length{session_minutes / spec.bars_per_day};
  const int steps_per_day = spec.bars_per_day * spec.substeps;

  const double var_day = spec.sigma * spec.sigma / kDaysPerYear;
  const double var_gap = var_day * spec.overnight_fraction;
  const double var_step = var_day * (1.0 - spec.overnight_fraction) / steps_per_day;
  const double drift_step = (spec.drift / kDaysPerYear) / steps_per_day - 0.5 * var_step;
  const double vol_step = std::sqrt(var_step);

  std::vector<int> offsets = spec.quote_offsets;
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

  Rng index_rng(derive_seed(seed, kIndexStream));
  Rng iv_rng(derive_seed(seed, kImpliedVolStream));

  data.index_bars.reserve(static_cast<std::size_t>(spec.n_days) * spec.bars_per_day);
  double level = spec.spot;
  double iv_log_dev = 0.0;

  for (std::size_t day = 0; day < data.calendar.size(); ++day) {
    const Date d = data.calendar[day];
    if (day > 0 && var_gap > 0) {
      level *= std::exp(-0.5 * var_gap + std::sqrt(var_gap) * index_rng.normal());
    }
    const double iv = spec.implied_vol * std::exp(iv_log_dev);

    // level at each bar boundary of the day, index 0 = open
    std::vector<double> boundary(static_cast<std::size_t>(spec.bars_per_day) + 1);
    boundary[0] = level;
    for (int b = 0; b < spec.bars_per_day; ++b) {
      MinuteBar bar;
      bar.timestamp = spec.session.open_at(d) + bar_length * (b + 1);
      bar.open = level;
      bar.high = level;
      bar.low = level;
      for (int s = 0; s < spec.substeps; ++s) {
        if (vol_step > 0 || drift_step != 0) level *= std::exp(drift_step + vol_step * index_rng.normal());
        bar.high = std::max(bar.high, level);
        bar.low = std::min(bar.low, level);
      }
      bar.close = level;
      bar.bid = std::max(level - spec.index_half_spread, 0.5 * level);
      bar.ask = level + spec.index_half_spread;
      data.index_bars.push_back(bar);
      boundary[static_cast<std::size_t>(b) + 1] = level;
    }

    for (int offset : offsets) {
      const Timestamp ts = spec.session.open_at(d) + std::chrono::minutes{offset};
      const double spot = boundary[static_cast<std::size_t>(offset / bar_length.count())];
      const double remaining = spec.session.remaining_fraction(ts);
      const double lo = std::ceil(spot * (1.0 - spec.strike_range) / spec.strike_grid);
      const double hi = std::floor(spot * (1.0 + spec.strike_range) / spec.strike_grid);
      for (int dte : spec.expiry_ladder) {
        const std::size_t expiry_index = day + static_cast<std::size_t>(dte);
        if (expiry_index >= data.calendar.size()) continue;
        const Date expiry = data.calendar[expiry_index];
        const double tau = (dte + remaining) / kDaysPerYear;
        auto& strikes = data.chains[expiry].strikes;
        for (double m = lo; m <= hi; m += 1.0) {
          const double strike = m * spec.strike_grid;
          const double mid = pricing::bsm_put_price({spot, strike, spec.rate, spec.dividend, iv, tau});
          const double half = 0.5 * spec.spread_fraction * mid;
          strikes[strike].push_back(QuoteTick{ts, std::max(mid - half, 0.0), mid + half});
        }
      }
    }

    data.vix9d.push_back(SeriesPoint{d, iv * 100.0});
    data.vix30d.push_back(SeriesPoint{d, iv * 100.0});
    iv_log_dev = (1.0 - spec.iv_mean_reversion) * iv_log_dev + spec.iv_vol_of_vol * iv_rng.normal();
  }

  data.risk_free.push_back(SeriesPoint{data.calendar.front(), spec.rate});
  data.dividend_yield.push_back(SeriesPoint{data.calendar.front(), spec.dividend});
  data.daily_bars = resample_daily(data.index_bars);
  data.finalize();
  return data;
}

}  // namespace putwrite::market
