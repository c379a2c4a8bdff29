#include "putwrite/backtester.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "putwrite/csv.hpp"
#include "putwrite/pricing.hpp"
#include "putwrite/rng.hpp"
#include "putwrite/vix_rank.hpp"

namespace putwrite::backtest {

using namespace std::chrono_literals;

std::string_view to_string(Sizing s) {
  switch (s) {
    case Sizing::Kelly: return "kelly";
    case Sizing::VixRank: return "vixrank";
    case Sizing::Hybrid: return "hybrid";
  }
  return "?";
}

std::string_view to_string(VixSource s) { return s == VixSource::Vix9d ? "vix9d" : "vix30d"; }

std::string_view to_string(VixTiming t) { return t == VixTiming::PriorClose ? "prior_close" : "same_day"; }

std::string_view to_string(TradeAction a) {
  switch (a) {
    case TradeAction::Open: return "open";
    case TradeAction::RollClose: return "roll_close";
    case TradeAction::RollOpen: return "roll_open";
    case TradeAction::ExpireSettle: return "expire_settle";
    case TradeAction::ForceClose: return "force_close";
  }
  return "?";
}

namespace {

std::string lower(std::string_view text) {
  std::string s(text);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Sizing parse_sizing(std::string_view text) {
  const auto s = lower(text);
  if (s == "kelly") return Sizing::Kelly;
  if (s == "vixrank" || s == "vix_rank" || s == "vix-rank") return Sizing::VixRank;
  if (s == "hybrid") return Sizing::Hybrid;
  throw std::invalid_argument("unknown sizing '" + std::string(text) + "'");
}

VixSource parse_vix_source(std::string_view text) {
  const auto s = lower(text);
  if (s == "vix9d") return VixSource::Vix9d;
  if (s == "vix30d" || s == "vix") return VixSource::Vix30d;
  throw std::invalid_argument("unknown VIX source '" + std::string(text) + "'");
}

VixTiming parse_vix_timing(std::string_view text) {
  const auto s = lower(text);
  if (s == "prior_close" || s == "prior") return VixTiming::PriorClose;
  if (s == "same_day" || s == "same") return VixTiming::SameDay;
  throw std::invalid_argument("unknown VIX timing '" + std::string(text) + "'");
}

void StrategyConfig::validate() const {
  if (target_dte < 0) throw std::invalid_argument("target_dte must be >= 0");
  if (!(otm_pct >= 0 && otm_pct < 100)) throw std::invalid_argument("otm_pct must lie in [0, 100)");
  const bool needs_estimator = sizing != Sizing::VixRank;
  const bool needs_vix = sizing != Sizing::Kelly;
  if (needs_estimator != estimator.has_value())
    throw std::invalid_argument(needs_estimator ? "sizing requires an estimator" : "estimator is only used by kelly/hybrid");
  if (needs_vix != vix.has_value())
    throw std::invalid_argument(needs_vix ? "sizing requires a VIX choice" : "VIX choice is only used by vixrank/hybrid");
  if (estimator && estimator->memory < 2) throw std::invalid_argument("estimator memory must be >= 2");
  if (vix && vix->memory < 1) throw std::invalid_argument("VIX memory must be >= 1");
  if (!(costs.commission_per_contract >= 0)) throw std::invalid_argument("commission must be >= 0");
  if (!(costs.spread_cross_fraction >= 0 && costs.spread_cross_fraction <= 1))
    throw std::invalid_argument("spread_cross must lie in [0, 1]");
  if (!(start_capital > 0)) throw std::invalid_argument("start_capital must be positive");
  if (kelly.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (!(kelly.f_max > 0 && kelly.f_max <= 1)) throw std::invalid_argument("f_max must lie in (0, 1]");
  if (kelly.drift_override && !std::isfinite(*kelly.drift_override))
    throw std::invalid_argument("drift_override must be finite");
  if (first_day && last_day && *first_day > *last_day) throw std::invalid_argument("first_day after last_day");
}

std::string StrategyConfig::id() const {
  std::string s(to_string(sizing));
  s += "_dte" + std::to_string(target_dte) + "_otm" + format_double(otm_pct);
  if (estimator) s += "_" + std::string(vol::to_string(estimator->kind)) + std::to_string(estimator->memory);
  if (vix) s += "_" + std::string(to_string(vix->source)) + "_" + std::to_string(vix->memory);
  return s;
}

std::vector<double> BacktestResult::equity_values() const {
  std::vector<double> v;
  v.reserve(equity_curve.size());
  for (const auto& p : equity_curve) v.push_back(p.value);
  return v;
}

double BacktestResult::unrealized_pnl() const {
  if (!open_position) return 0.0;
  const auto& p = *open_position;
  return (p.entry_fill - p.mark) * p.contract.multiplier * static_cast<double>(p.qty);
}

RolloverDecision rollover_decision(const std::optional<Position>& position, std::span<const Date> available,
                                   Date today, int target_dte, const TradingCalendar& calendar) {
  if (available.empty()) return {RolloverDecision::Kind::Hold, std::nullopt};
  std::optional<Date> best;
  int best_dist = std::numeric_limits<int>::max();
  int best_dte = 0;
  for (Date e : available) {
    const int dte = calendar.trading_days_between(today, e);
    if (dte < 0) continue;
    const int dist = std::abs(dte - target_dte);
    if (dist < best_dist || (dist == best_dist && dte < best_dte)) {
      best = e;
      best_dist = dist;
      best_dte = dte;
    }
  }
  if (!best) return {RolloverDecision::Kind::Hold, std::nullopt};
  if (!position) return {RolloverDecision::Kind::Open, best};
  const int held = calendar.trading_days_between(today, position->contract.expiry);
  if (std::abs(held - target_dte) <= best_dist) return {RolloverDecision::Kind::Hold, position->contract.expiry};
  return {RolloverDecision::Kind::Roll, best};
}

Fill execute_fill(const OptionQuote& quote, Side side, std::int64_t qty, const CostModel& costs, double multiplier) {
  if (qty < 1) throw std::invalid_argument("execute_fill: qty must be >= 1");
  if (!(quote.bid >= 0 && quote.ask >= quote.bid)) throw std::invalid_argument("execute_fill: crossed or negative quote");
  if (!(quote.ask > 0)) throw std::invalid_argument("execute_fill: zero quote");
  const double width = quote.ask - quote.bid;
  const double c = costs.spread_cross_fraction;
  Fill f;
  f.commission = costs.commission_per_contract * static_cast<double>(qty);
  const double notional_qty = multiplier * static_cast<double>(qty);
  if (side == Side::SellToOpen) {
    f.price = quote.ask - c * width;
    f.cash_delta = f.price * notional_qty - f.commission;
  } else {
    f.price = quote.bid + c * width;
    f.cash_delta = -f.price * notional_qty - f.commission;
  }
  return f;
}

TradeRecord settle_at_expiry(const Position& position, double settlement_price, Timestamp when) {
  const double intrinsic = std::max(position.contract.strike - settlement_price, 0.0);
  const double units = position.contract.multiplier * static_cast<double>(position.qty);
  TradeRecord t;
  t.time = when;
  t.action = TradeAction::ExpireSettle;
  t.contract = position.contract;
  t.qty = position.qty;
  t.fill_price = intrinsic;
  t.commission = 0.0;
  t.cash_delta = -intrinsic * units;
  t.realized_pnl = (position.entry_fill - intrinsic) * units;
  t.spot = settlement_price;
  return t;
}

HoldingPlan planned_holding(int entry_dte, std::span<const int> available_dte, int target_dte) {
  if (entry_dte <= 0) return {0, true};
  int best = std::numeric_limits<int>::max();
  for (int d : available_dte) {
    if (d >= 0) best = std::min(best, std::abs(d - target_dte));
  }
  for (int h = 1; h <= entry_dte; ++h) {
    if (std::abs(entry_dte - h - target_dte) > best) return {h, false};
  }
  return {entry_dte, true};
}

std::vector<double> buy_and_hold_benchmark(std::span<const double> closes, double start_capital) {
  if (closes.empty()) throw std::invalid_argument("buy_and_hold_benchmark: empty series");
  if (!(closes.front() > 0)) throw std::invalid_argument("buy_and_hold_benchmark: first close must be positive");
  std::vector<double> out;
  out.reserve(closes.size());
  for (double c : closes) out.push_back(start_capital * c / closes.front());
  return out;
}

namespace {

struct DayBars {
  Date date;
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<DayBars> group_by_day(const std::vector<market::MinuteBar>& bars) {
  std::vector<DayBars> out;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const Date d = date_of(bars[i].timestamp);
    if (out.empty() || out.back().date != d) out.push_back({d, i, i});
    out.back().end = i + 1;
  }
  return out;
}

// Days of the run window that carry index bars.
std::vector<DayBars> run_days(const StrategyConfig& config, const MarketDataset& data) {
  auto all = group_by_day(data.index_bars);
  std::vector<DayBars> out;
  const auto& cal = data.calendar;
  for (const auto& d : all) {
    if (config.first_day && d.date < *config.first_day) continue;
    if (config.last_day && d.date > *config.last_day) continue;
    if (!cal.empty() && !std::binary_search(cal.begin(), cal.end(), d.date)) continue;
    out.push_back(d);
  }
  return out;
}

double series_value_or_zero(const market::Series& s, Date d) {
  if (s.empty()) return 0.0;
  return market::rate_at(s, d);
}

struct Runner {
  const StrategyConfig& cfg;
  const MarketDataset& data;
  TradingCalendar calendar;
  BacktestResult res;
  double cash = 0.0;
  std::optional<Position> pos;
  bool force_close_pending = false;

  Runner(const StrategyConfig& c, const MarketDataset& d) : cfg(c), data(d), calendar(d.trading_calendar()) {
    cash = cfg.start_capital;
  }

  void note(Date d, const std::string& what) { res.diagnostics.push_back(format_date(d) + ": " + what); }

  double equity() const {
    if (!pos) return cash;
    return cash - pos->mark * pos->contract.multiplier * static_cast<double>(pos->qty);
  }

  void close_position(const OptionQuote& quote, TradeAction action, double spot, bool breach) {
    const auto fill = execute_fill(quote, Side::BuyToClose, pos->qty, cfg.costs, pos->contract.multiplier);
    TradeRecord t;
    t.time = quote.timestamp;
    t.action = action;
    t.contract = pos->contract;
    t.qty = pos->qty;
    t.fill_price = fill.price;
    t.commission = fill.commission;
    t.cash_delta = fill.cash_delta;
    t.realized_pnl =
        (pos->entry_fill - fill.price) * pos->contract.multiplier * static_cast<double>(pos->qty) - fill.commission;
    t.spot = spot;
    t.margin_breach = breach;
    cash += fill.cash_delta;
    pos.reset();
    t.portfolio_value = cash;
    res.trades.push_back(t);
  }

  std::optional<double> kelly_fraction(Date today, Timestamp ts, double spot, double strike, double premium,
                                       int entry_dte, const std::vector<int>& available_dte) {
    const auto& choice = *cfg.estimator;
    auto hist_end = std::lower_bound(data.daily_bars.begin(), data.daily_bars.end(), today,
                                     [](const market::DailyBar& b, Date d) { return b.date < d; });
    const auto have = static_cast<int>(hist_end - data.daily_bars.begin());
    if (have < vol::required_history(choice)) {
      note(today, "insufficient volatility history");
      return std::nullopt;
    }
    const auto est = vol::estimate(choice, std::span(data.daily_bars.data(), static_cast<std::size_t>(have)));
    if (est.clamped) note(today, "negative variance estimate clamped to 0");

    const double tau = (entry_dte + data.session.remaining_fraction(ts)) / 252.0;
    const auto plan = planned_holding(entry_dte, available_dte, cfg.target_dte);
    double horizon = tau;
    double residual = 0.0;
    if (!plan.to_expiry) {
      horizon = plan.days / 252.0;
      residual = std::max(tau - horizon, 0.0);
    }
    kelly::SimConfig sim;
    sim.spot = spot;
    sim.sigma = est.annualized_sigma;
    sim.rate = series_value_or_zero(data.risk_free, today);
    sim.dividend = series_value_or_zero(data.dividend_yield, today);
    sim.horizon = horizon;
    sim.steps = std::max(1, static_cast<int>(std::ceil(horizon * 252.0 - 1e-9)));
    sim.n_paths = cfg.kelly.n_paths;
    sim.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(ts.time_since_epoch().count()));
    sim.drift_override = cfg.kelly.drift_override;
    const auto pab = kelly::estimate_pab(premium, strike, sim, residual);
    return kelly::kelly_fraction_partial(pab, cfg.kelly.f_max).clamped_f;
  }

  std::optional<double> vix_rank(Date today) {
    const auto& series = cfg.vix->source == VixSource::Vix9d ? data.vix9d : data.vix30d;
    auto end = cfg.vix_timing == VixTiming::PriorClose
                   ? std::lower_bound(series.begin(), series.end(), today,
                                      [](const market::SeriesPoint& p, Date d) { return p.date < d; })
                   : std::upper_bound(series.begin(), series.end(), today,
                                      [](Date d, const market::SeriesPoint& p) { return d < p.date; });
    const auto have = end - series.begin();
    if (have < cfg.vix->memory) {
      note(today, "insufficient VIX history");
      return std::nullopt;
    }
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(cfg.vix->memory));
    for (auto it = end - cfg.vix->memory; it != end; ++it) window.push_back(it->value);
    return vix::percentile_rank(window.back(), window);
  }

  std::int64_t size_position(Date today, Timestamp ts, double spot, double strike, double premium, double margin,
                             int entry_dte, const std::vector<int>& available_dte) {
    const double pv = cash;
    if (!(pv > 0)) return 0;
    switch (cfg.sizing) {
      case Sizing::Kelly: {
        const auto f = kelly_fraction(today, ts, spot, strike, premium, entry_dte, available_dte);
        if (!f) return 0;
        return kelly::kelly_contracts(pv, margin, kelly::KellyFraction{*f, *f, cfg.kelly.f_max});
      }
      case Sizing::VixRank: {
        const auto rank = vix_rank(today);
        if (!rank) return 0;
        return vix::vix_rank_contracts(pv, margin, *rank);
      }
      case Sizing::Hybrid: {
        const auto rank = vix_rank(today);
        if (!rank) return 0;
        const auto f = kelly_fraction(today, ts, spot, strike, premium, entry_dte, available_dte);
        if (!f) return 0;
        return vix::hybrid_contracts(pv, margin, kelly::KellyFraction{*f, *f, cfg.kelly.f_max}, *rank);
      }
    }
    return 0;
  }

  // One attempt at the morning decision. Returns false when quotes are
  // missing and the decision should be retried on a later bar.
  bool decide(Date today, const market::MinuteBar& bar) {
    const Timestamp ts = bar.timestamp;
    const double spot = bar.close;

    if (force_close_pending && pos) {
      auto q = data.quote_at(pos->contract.expiry, pos->contract.strike, ts);
      if (!q) return false;
      close_position(*q, TradeAction::ForceClose, spot, true);
      force_close_pending = false;
    }

    const auto expiries = data.tradable_expiries(today, ts);
    if (expiries.empty()) return false;
    const auto d = rollover_decision(pos, expiries, today, cfg.target_dte, calendar);

    DecisionRecord rec;
    rec.time = ts;
    for (Date e : expiries) rec.available_dte.push_back(calendar.trading_days_between(today, e));
    if (pos) rec.held_dte = calendar.trading_days_between(today, pos->contract.expiry);
    rec.chosen_dte = d.expiry ? calendar.trading_days_between(today, *d.expiry) : 0;
    rec.kind = d.kind == RolloverDecision::Kind::Hold   ? DecisionRecord::Kind::Hold
               : d.kind == RolloverDecision::Kind::Open ? DecisionRecord::Kind::Open
                                                        : DecisionRecord::Kind::Roll;

    if (d.kind == RolloverDecision::Kind::Hold) {
      res.decisions.push_back(std::move(rec));
      return true;
    }

    const Date expiry = *d.expiry;
    const int dte = rec.chosen_dte;
    const auto strikes = data.strikes_at(expiry, ts);
    const double rate = series_value_or_zero(data.risk_free, today);
    const double tau = (dte + data.session.remaining_fraction(ts)) / 252.0;
    double strike = 0.0;
    try {
      strike = pricing::select_strike(strikes, spot, rate, tau, cfg.otm_pct, data.strike_grid);
    } catch (const std::invalid_argument&) {
      return false;
    }
    const auto quote = data.quote_at(expiry, strike, ts);
    if (!quote) return false;
    std::optional<OptionQuote> close_quote;
    if (pos) {
      close_quote = data.quote_at(pos->contract.expiry, pos->contract.strike, ts);
      if (!close_quote) return false;
    }
    res.decisions.push_back(std::move(rec));

    if (close_quote) close_position(*close_quote, TradeAction::RollClose, spot, false);

    if (!(quote->ask > 0)) {
      note(today, "selected put has a zero quote; no position opened");
      return true;
    }
    const double premium = quote->ask - cfg.costs.spread_cross_fraction * (quote->ask - quote->bid);
    if (!(premium > 0)) {
      note(today, "selected put fills at zero; no position opened");
      return true;
    }
    const double margin = pricing::put_margin(premium, spot, strike);
    const auto qty = size_position(today, ts, spot, strike, premium, margin, dte, rec_available(expiries, today));
    if (qty < 1) return true;

    const auto fill = execute_fill(*quote, Side::SellToOpen, qty, cfg.costs, data.multiplier);
    const double pv_before = cash;
    cash += fill.cash_delta;
    Position p;
    p.contract = quote->contract;
    p.qty = qty;
    p.entry_fill = fill.price;
    p.entry_time = ts;
    p.margin_held = margin * static_cast<double>(qty);
    p.mark = quote->mid();
    pos = p;

    TradeRecord t;
    t.time = ts;
    t.action = d.kind == RolloverDecision::Kind::Open ? TradeAction::Open : TradeAction::RollOpen;
    t.contract = p.contract;
    t.qty = qty;
    t.fill_price = fill.price;
    t.commission = fill.commission;
    t.cash_delta = fill.cash_delta;
    t.realized_pnl = -fill.commission;
    t.spot = spot;
    t.portfolio_value = pv_before;
    t.margin = p.margin_held;
    res.trades.push_back(t);
    ++res.n_positions;
    return true;
  }

  std::vector<int> rec_available(const std::vector<Date>& expiries, Date today) const {
    std::vector<int> out;
    out.reserve(expiries.size());
    for (Date e : expiries) out.push_back(calendar.trading_days_between(today, e));
    return out;
  }

  void end_of_day(Date today, const market::MinuteBar& last_bar) {
    const Timestamp close_ts = data.session.close_at(today);
    const double close_px = last_bar.close;
    if (pos && pos->contract.expiry <= today) {
      if (pos->contract.expiry < today) note(today, "position expired on a day without data; settled late");
      auto t = settle_at_expiry(*pos, close_px, close_ts);
      cash += t.cash_delta;
      pos.reset();
      force_close_pending = false;
      t.portfolio_value = cash;
      res.trades.push_back(t);
    } else if (pos) {
      auto q = data.latest_quote(pos->contract.expiry, pos->contract.strike, data.session.open_at(today), close_ts);
      if (q) {
        pos->mark = q->mid();
      } else {
        note(today, "no closing quote for open position; stale mark kept");
      }
      pos->margin_held = static_cast<double>(pos->qty) * pricing::put_margin(pos->mark, close_px, pos->contract.strike);
      if (pos->margin_held > equity() && !force_close_pending) {
        note(today, "margin breach; position will be force-closed");
        force_close_pending = true;
      }
    }
    res.equity_curve.push_back({close_ts, equity()});
  }

  void run() {
    const auto days = run_days(cfg, data);
    if (days.empty()) throw std::invalid_argument("run_backtest: no index bars inside the run window");
    res.equity_curve.push_back({data.session.open_at(days.front().date), cfg.start_capital});
    for (const auto& day : days) {
      const Date today = day.date;
      const Timestamp first = data.session.open_at(today) + 15min;
      const Timestamp last = data.session.close_at(today) - 30min;
      bool decided = false;
      for (std::size_t i = day.begin; i < day.end && !decided; ++i) {
        const auto& bar = data.index_bars[i];
        if (bar.timestamp < first) continue;
        if (bar.timestamp > last) break;
        decided = decide(today, bar);
      }
      if (!decided) note(today, "no tradable quotes inside the fill window; decision skipped");
      const auto& last_bar = data.index_bars[day.end - 1];
      end_of_day(today, last_bar);
    }
    res.open_position = pos;
    res.final_cash = cash;
  }
};

}  // namespace

BacktestResult run_backtest(const StrategyConfig& config, const MarketDataset& data) {
  config.validate();
  Runner r(config, data);
  r.run();
  return std::move(r.res);
}

std::vector<double> benchmark_closes(const StrategyConfig& config, const MarketDataset& data) {
  const auto days = run_days(config, data);
  if (days.empty()) throw std::invalid_argument("benchmark_closes: no index bars inside the run window");
  std::vector<double> closes;
  closes.reserve(days.size() + 1);
  // same sampling as the strategy curve: first open, then every close
  closes.push_back(data.index_bars[days.front().begin].open);
  for (const auto& d : days) closes.push_back(data.index_bars[d.end - 1].close);
  return closes;
}

}  // namespace putwrite::backtest
