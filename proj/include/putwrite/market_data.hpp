#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "putwrite/calendar.hpp"

namespace putwrite::market {

struct MinuteBar {
  Timestamp timestamp;  // bar end time
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double bid = 0.0;
  double ask = 0.0;

  bool operator==(const MinuteBar&) const = default;
};

struct DailyBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;

  bool operator==(const DailyBar&) const = default;
};

/// European, PM cash-settled index put.
struct OptionContract {
  std::string underlying;
  Date expiry;
  double strike = 0.0;
  double multiplier = 100.0;

  bool operator==(const OptionContract&) const = default;
};

struct OptionQuote {
  Timestamp timestamp;
  OptionContract contract;
  double bid = 0.0;
  double ask = 0.0;

  double mid() const { return 0.5 * (bid + ask); }
};

/// Quote without its contract; the chain map keys supply expiry and strike.
struct QuoteTick {
  Timestamp timestamp;
  double bid = 0.0;
  double ask = 0.0;

  bool operator==(const QuoteTick&) const = default;
};

struct SeriesPoint {
  Date date;
  double value = 0.0;

  bool operator==(const SeriesPoint&) const = default;
};

using Series = std::vector<SeriesPoint>;

/// All quotes for one expiry, strike -> time-sorted ticks. `first_quote` and
/// `last_quote` bound the listing window and are maintained by `finalize()`.
struct ExpiryChain {
  std::map<double, std::vector<QuoteTick>> strikes;
  Timestamp first_quote{};
  Timestamp last_quote{};

  bool operator==(const ExpiryChain&) const = default;
};

using ChainMap = std::map<Date, ExpiryChain>;

/// Immutable input of a backtest. Build it, call `finalize()`, then share it
/// read-only across workers.
struct MarketDataset {
  std::string underlying = "SPX";
  double multiplier = 100.0;
  double strike_grid = 25.0;
  Session session;
  std::vector<Date> calendar;

  std::vector<MinuteBar> index_bars;
  std::vector<DailyBar> daily_bars;
  ChainMap chains;
  Series vix9d;
  Series vix30d;
  Series risk_free;
  Series dividend_yield;

  /// Sorts quote ticks, refreshes listing windows and checks the dataset
  /// invariants; throws std::invalid_argument on violation.
  void finalize();

  TradingCalendar trading_calendar() const { return TradingCalendar{calendar}; }

  OptionContract contract(Date expiry, double strike) const;

  /// Quote stamped exactly at `ts`.
  std::optional<OptionQuote> quote_at(Date expiry, double strike, Timestamp ts) const;

  /// Latest quote in [from, to].
  std::optional<OptionQuote> latest_quote(Date expiry, double strike, Timestamp from, Timestamp to) const;

  /// Expiries on or after `today` with at least one strike quoted at `ts`.
  std::vector<Date> tradable_expiries(Date today, Timestamp ts) const;

  /// Strikes of `expiry` quoted exactly at `ts`, ascending.
  std::vector<double> strikes_at(Date expiry, Timestamp ts) const;

  bool operator==(const MarketDataset&) const = default;
};

/// Field name -> CSV column header. Every field a loader needs must be mapped.
struct CsvSchema {
  std::map<std::string, std::string> columns;

  const std::string& column_for(const std::string& field) const;

  static CsvSchema minute_bars();
  static CsvSchema daily_bars();
  static CsvSchema option_quotes();
  static CsvSchema series();
};

std::vector<MinuteBar> load_minute_bars(const std::filesystem::path& path, const CsvSchema& schema);
std::vector<DailyBar> load_daily_bars(const std::filesystem::path& path, const CsvSchema& schema);
ChainMap load_option_quotes(const std::filesystem::path& path, const CsvSchema& schema);
Series load_series(const std::filesystem::path& path, const CsvSchema& schema);

/// Aggregates intraday bars into one bar per date: first open, max high, min
/// low, last close. With a non-empty calendar, dates outside it are dropped.
std::vector<DailyBar> resample_daily(std::span<const MinuteBar> bars, std::span<const Date> calendar = {});

/// Step lookup: value of the latest point dated on or before `d`.
double rate_at(const Series& series, Date d);

/// Same as `rate_at` but returns `fallback` for an empty series.
double rate_at_or(const Series& series, Date d, double fallback);

/// Parameters of the artificial market. Index follows GBM; option quotes are
/// BSM values under a (possibly stochastic) implied volatility.
struct SynthSpec {
  Date start = Date{std::chrono::year{2022} / 1 / 3};
  int n_days = 252;
  int bars_per_day = 390;
  int substeps = 1;  // GBM steps per bar; bar high/low are the extremes
  Session session;

  double spot = 4000.0;
  double sigma = 0.15;  // realized volatility of the index path
  double drift = 0.0;   // annual mu of the index path
  double overnight_fraction = 0.0;  // share of daily variance in the open gap
  double index_half_spread = 0.05;

  double implied_vol = 0.18;
  double iv_mean_reversion = 0.05;  // per day, on log(iv / implied_vol)
  double iv_vol_of_vol = 0.0;       // per day, on log(iv / implied_vol)

  double rate = 0.02;
  double dividend = 0.0;
  double spread_fraction = 0.02;  // option bid/ask width as a fraction of mid

  std::vector<int> expiry_ladder{0, 1, 2, 3, 4, 5, 6, 7};  // listed DTEs
  double strike_grid = 25.0;
  double strike_range = 0.15;                // strikes within spot*(1 +/- range)
  std::vector<int> quote_offsets{15, 390};   // minutes after the open

  std::string underlying = "SPX";

  void validate() const;
};

MarketDataset synthesize_market(const SynthSpec& spec, std::uint64_t seed);

/// Writes `manifest.json` plus one CSV per member into `dir`.
void save_dataset(const MarketDataset& data, const std::filesystem::path& dir);

/// Loads a dataset from its manifest, resampling daily bars when the
/// manifest lists none.
MarketDataset load_dataset(const std::filesystem::path& manifest);

}  // namespace putwrite::market
