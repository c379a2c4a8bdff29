#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "putwrite/kelly.hpp"
#include "putwrite/market_data.hpp"
#include "putwrite/metrics.hpp"
#include "putwrite/vol_estimators.hpp"

namespace putwrite::backtest {

using market::MarketDataset;
using market::OptionContract;
using market::OptionQuote;

enum class Sizing { Kelly, VixRank, Hybrid };
enum class VixSource { Vix9d, Vix30d };

/// Which VIX observation is "current" at the morning decision.
enum class VixTiming { PriorClose, SameDay };

std::string_view to_string(Sizing s);
std::string_view to_string(VixSource s);
std::string_view to_string(VixTiming t);
Sizing parse_sizing(std::string_view text);
VixSource parse_vix_source(std::string_view text);
VixTiming parse_vix_timing(std::string_view text);

struct VixChoice {
  VixSource source = VixSource::Vix9d;
  int memory = 63;  // window W in trading days

  bool operator==(const VixChoice&) const = default;
};

struct CostModel {
  double commission_per_contract = 0.65;
  /// Fraction of the bid/ask width paid on each fill; 0.5 fills at mid.
  double spread_cross_fraction = 0.5;

  bool operator==(const CostModel&) const = default;
};

struct KellySettings {
  int n_paths = 10'000;
  double f_max = 1.0;
  std::optional<double> drift_override;

  bool operator==(const KellySettings&) const = default;
};

/// One grid point.
struct StrategyConfig {
  int target_dte = 0;
  double otm_pct = 0.0;
  Sizing sizing = Sizing::Kelly;
  std::optional<vol::EstimatorChoice> estimator;  // Kelly and Hybrid only
  std::optional<VixChoice> vix;                   // VixRank and Hybrid only
  VixTiming vix_timing = VixTiming::PriorClose;
  KellySettings kelly;
  CostModel costs;
  double start_capital = 5'000'000.0;
  std::uint64_t seed = 0;
  std::optional<Date> first_day;
  std::optional<Date> last_day;

  void validate() const;

  /// Stable identifier built from the grid axes, e.g. "kelly_dte1_otm5_gk21".
  std::string id() const;

  bool operator==(const StrategyConfig&) const = default;
};

struct Position {
  OptionContract contract;
  std::int64_t qty = 0;  // short contracts
  double entry_fill = 0.0;
  Timestamp entry_time;
  double margin_held = 0.0;
  double mark = 0.0;  // last mid used for valuation
};

enum class TradeAction { Open, RollClose, RollOpen, ExpireSettle, ForceClose };

std::string_view to_string(TradeAction a);

struct TradeRecord {
  Timestamp time;
  TradeAction action = TradeAction::Open;
  OptionContract contract;
  std::int64_t qty = 0;
  double fill_price = 0.0;  // settlement value for ExpireSettle
  double commission = 0.0;
  double realized_pnl = 0.0;
  double cash_delta = 0.0;
  double spot = 0.0;
  double portfolio_value = 0.0;  // PV used for sizing (opens), PV after (closes)
  double margin = 0.0;           // margin held by the position after an open
  bool margin_breach = false;

  bool operator==(const TradeRecord&) const = default;
};

struct EquityPoint {
  Timestamp time;
  double value = 0.0;

  bool operator==(const EquityPoint&) const = default;
};

/// Outcome of one morning rollover evaluation, kept for auditing.
struct DecisionRecord {
  Timestamp time;
  std::vector<int> available_dte;
  std::optional<int> held_dte;
  int chosen_dte = 0;
  enum class Kind { Hold, Open, Roll } kind = Kind::Hold;

  bool operator==(const DecisionRecord&) const = default;
};

struct BacktestResult {
  std::vector<EquityPoint> equity_curve;
  std::vector<TradeRecord> trades;
  std::vector<DecisionRecord> decisions;
  std::int64_t n_positions = 0;
  std::optional<Position> open_position;
  double final_cash = 0.0;
  std::vector<std::string> diagnostics;

  std::vector<double> equity_values() const;

  /// Mark-to-market P&L of the open position against its entry fill.
  double unrealized_pnl() const;
};

struct RolloverDecision {
  enum class Kind { Hold, Open, Roll } kind = Kind::Hold;
  std::optional<Date> expiry;
};

/// Chooses the listed expiry with DTE closest to `target_dte` (nearer expiry
/// on equal distance). With a position open, rolls only on strict
/// improvement. No listed expiries -> Hold.
RolloverDecision rollover_decision(const std::optional<Position>& position, std::span<const Date> available,
                                   Date today, int target_dte, const TradingCalendar& calendar);

enum class Side { SellToOpen, BuyToClose };

struct Fill {
  double price = 0.0;
  double commission = 0.0;
  double cash_delta = 0.0;
};

/// Fills `spread_cross_fraction` of the width away from the touch. Cash
/// delta includes the contract multiplier and commissions.
Fill execute_fill(const OptionQuote& quote, Side side, std::int64_t qty, const CostModel& costs,
                  double multiplier = 100.0);

/// PM cash settlement at intrinsic value; no commission.
TradeRecord settle_at_expiry(const Position& position, double settlement_price, Timestamp when);

struct HoldingPlan {
  int days = 0;            // mornings until the roll, or entry_dte
  bool to_expiry = false;  // settled rather than rolled
};

/// Expected life of a new position under the roll rule, assuming every later
/// morning lists the same DTEs as today.
HoldingPlan planned_holding(int entry_dte, std::span<const int> available_dte, int target_dte);

BacktestResult run_backtest(const StrategyConfig& config, const MarketDataset& data);

/// equity_t = start_capital * close_t / close_0.
std::vector<double> buy_and_hold_benchmark(std::span<const double> closes, double start_capital);

/// Daily closes of `data` inside the config's run window.
std::vector<double> benchmark_closes(const StrategyConfig& config, const MarketDataset& data);

struct GridRun {
  StrategyConfig config;
  std::optional<BacktestResult> result;
  std::optional<metrics::MetricsReport> report;
  std::string error;
};

/// Runs every config on `jobs` worker threads. Output order and content are
/// independent of `jobs`; a failing config is reported in its row.
std::vector<GridRun> run_grid(std::span<const StrategyConfig> configs, const MarketDataset& data, int jobs);

}  // namespace putwrite::backtest
