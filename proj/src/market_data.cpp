#include "putwrite/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "putwrite/csv.hpp"

namespace putwrite::market {

namespace {

void check_bar(const MinuteBar& b, const std::string& where) {
  if (!(b.open > 0 && b.high > 0 && b.low > 0 && b.close > 0 && b.bid > 0 && b.ask > 0)) {
    throw std::invalid_argument(where + ": prices must be strictly positive");
  }
  if (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close)) {
    throw std::invalid_argument(where + ": high/low do not bracket open/close");
  }
  if (b.bid > b.ask) throw std::invalid_argument(where + ": bid > ask");
}

void check_daily(const DailyBar& b, const std::string& where) {
  if (!(b.open > 0 && b.high > 0 && b.low > 0 && b.close > 0)) {
    throw std::invalid_argument(where + ": prices must be strictly positive");
  }
  if (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close)) {
    throw std::invalid_argument(where + ": high/low do not bracket open/close");
  }
}

void check_series(const Series& s, const char* name, bool positive) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i].value) || (positive && s[i].value <= 0)) {
      throw std::invalid_argument(std::string(name) + ": invalid value on " + format_date(s[i].date));
    }
    if (i > 0 && s[i].date <= s[i - 1].date) {
      throw std::invalid_argument(std::string(name) + ": dates must be strictly increasing");
    }
  }
}

const std::vector<QuoteTick>* ticks_for(const ChainMap& chains, Date expiry, double strike) {
  auto chain = chains.find(expiry);
  if (chain == chains.end()) return nullptr;
  auto it = chain->second.strikes.find(strike);
  if (it == chain->second.strikes.end()) return nullptr;
  return &it->second;
}

const QuoteTick* tick_at(const std::vector<QuoteTick>& ticks, Timestamp ts) {
  auto it = std::lower_bound(ticks.begin(), ticks.end(), ts,
                             [](const QuoteTick& q, Timestamp t) { return q.timestamp < t; });
  if (it == ticks.end() || it->timestamp != ts) return nullptr;
  return &*it;
}

}  // namespace

void MarketDataset::finalize() {
  for (std::size_t i = 0; i < index_bars.size(); ++i) {
    const std::string where = "index bar " + std::to_string(i + 1);
    check_bar(index_bars[i], where);
    if (i > 0 && index_bars[i].timestamp <= index_bars[i - 1].timestamp) {
      throw std::invalid_argument(where + ": timestamps must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < daily_bars.size(); ++i) {
    check_daily(daily_bars[i], "daily bar " + std::to_string(i + 1));
    if (i > 0 && daily_bars[i].date <= daily_bars[i - 1].date) {
      throw std::invalid_argument("daily bars: dates must be strictly increasing");
    }
  }
  if (calendar.empty()) {
    for (const auto& b : daily_bars) calendar.push_back(b.date);
  }
  (void)TradingCalendar{calendar};  // validates ordering

  std::optional<Date> first_day;
  if (!index_bars.empty()) first_day = date_of(index_bars.front().timestamp);
  else if (!daily_bars.empty()) first_day = daily_bars.front().date;

  for (auto& [expiry, chain] : chains) {
    if (first_day && expiry < *first_day) {
      throw std::invalid_argument("option expiry " + format_date(expiry) + " precedes the first bar");
    }
    bool any = false;
    for (auto& [strike, ticks] : chain.strikes) {
      if (!(strike > 0)) throw std::invalid_argument("option strike must be positive");
      std::sort(ticks.begin(), ticks.end(),
                [](const QuoteTick& a, const QuoteTick& b) { return a.timestamp < b.timestamp; });
      for (std::size_t i = 0; i < ticks.size(); ++i) {
        const auto& q = ticks[i];
        if (!(q.bid >= 0 && q.bid <= q.ask)) {
          throw std::invalid_argument("option quote " + format_date(expiry) + " K=" + format_double(strike) + " at " +
                                      format_timestamp(q.timestamp) + ": require 0 <= bid <= ask");
        }
        if (i > 0 && q.timestamp == ticks[i - 1].timestamp) {
          throw std::invalid_argument("duplicate option quote timestamp " + format_timestamp(q.timestamp));
        }
      }
      if (ticks.empty()) continue;
      if (!any || ticks.front().timestamp < chain.first_quote) chain.first_quote = ticks.front().timestamp;
      if (!any || ticks.back().timestamp > chain.last_quote) chain.last_quote = ticks.back().timestamp;
      any = true;
    }
  }

  check_series(vix9d, "vix9d", true);
  check_series(vix30d, "vix30d", true);
  check_series(risk_free, "risk_free", false);
  check_series(dividend_yield, "dividend_yield", false);
}

OptionContract MarketDataset::contract(Date expiry, double strike) const {
  return OptionContract{underlying, expiry, strike, multiplier};
}

std::optional<OptionQuote> MarketDataset::quote_at(Date expiry, double strike, Timestamp ts) const {
  const auto* ticks = ticks_for(chains, expiry, strike);
  if (ticks == nullptr) return std::nullopt;
  const auto* tick = tick_at(*ticks, ts);
  if (tick == nullptr) return std::nullopt;
  return OptionQuote{tick->timestamp, contract(expiry, strike), tick->bid, tick->ask};
}

std::optional<OptionQuote> MarketDataset::latest_quote(Date expiry, double strike, Timestamp from,
                                                       Timestamp to) const {
  const auto* ticks = ticks_for(chains, expiry, strike);
  if (ticks == nullptr) return std::nullopt;
  auto it = std::upper_bound(ticks->begin(), ticks->end(), to,
                             [](Timestamp t, const QuoteTick& q) { return t < q.timestamp; });
  if (it == ticks->begin()) return std::nullopt;
  --it;
  if (it->timestamp < from) return std::nullopt;
  return OptionQuote{it->timestamp, contract(expiry, strike), it->bid, it->ask};
}

std::vector<Date> MarketDataset::tradable_expiries(Date today, Timestamp ts) const {
  std::vector<Date> out;
  for (auto it = chains.lower_bound(today); it != chains.end(); ++it) {
    const ExpiryChain& chain = it->second;
    if (chain.first_quote > ts || chain.last_quote < ts) continue;
    for (const auto& [strike, ticks] : chain.strikes) {
      if (tick_at(ticks, ts) != nullptr) {
        out.push_back(it->first);
        break;
      }
    }
  }
  return out;
}

std::vector<double> MarketDataset::strikes_at(Date expiry, Timestamp ts) const {
  std::vector<double> out;
  auto chain = chains.find(expiry);
  if (chain == chains.end()) return out;
  for (const auto& [strike, ticks] : chain->second.strikes) {
    if (tick_at(ticks, ts) != nullptr) out.push_back(strike);
  }
  return out;
}

const std::string& CsvSchema::column_for(const std::string& field) const {
  auto it = columns.find(field);
  if (it == columns.end()) throw std::invalid_argument("schema does not map field '" + field + "'");
  return it->second;
}

CsvSchema CsvSchema::minute_bars() {
  return {{{"timestamp", "timestamp"},
           {"open", "open"},
           {"high", "high"},
           {"low", "low"},
           {"close", "close"},
           {"bid", "bid"},
           {"ask", "ask"}}};
}

CsvSchema CsvSchema::daily_bars() {
  return {{{"date", "date"}, {"open", "open"}, {"high", "high"}, {"low", "low"}, {"close", "close"}}};
}

CsvSchema CsvSchema::option_quotes() {
  return {{{"timestamp", "timestamp"}, {"expiry", "expiry"}, {"strike", "strike"}, {"bid", "bid"}, {"ask", "ask"}}};
}

CsvSchema CsvSchema::series() { return {{{"date", "date"}, {"value", "value"}}}; }

std::vector<MinuteBar> load_minute_bars(const std::filesystem::path& path, const CsvSchema& schema) {
  CsvReader csv(path);
  const auto c_ts = csv.column(schema.column_for("timestamp"));
  const auto c_open = csv.column(schema.column_for("open"));
  const auto c_high = csv.column(schema.column_for("high"));
  const auto c_low = csv.column(schema.column_for("low"));
  const auto c_close = csv.column(schema.column_for("close"));
  const auto c_bid = csv.column(schema.column_for("bid"));
  const auto c_ask = csv.column(schema.column_for("ask"));

  std::vector<MinuteBar> bars;
  while (csv.next()) {
    MinuteBar b;
    try {
      b.timestamp = parse_timestamp(csv.field(c_ts));
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    b.open = csv.number(c_open);
    b.high = csv.number(c_high);
    b.low = csv.number(c_low);
    b.close = csv.number(c_close);
    b.bid = csv.number(c_bid);
    b.ask = csv.number(c_ask);
    try {
      check_bar(b, "bar");
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    if (!bars.empty() && b.timestamp <= bars.back().timestamp) {
      csv.fail("timestamp " + format_timestamp(b.timestamp) + " is not after the previous row");
    }
    bars.push_back(b);
  }
  return bars;
}

std::vector<DailyBar> load_daily_bars(const std::filesystem::path& path, const CsvSchema& schema) {
  CsvReader csv(path);
  const auto c_date = csv.column(schema.column_for("date"));
  const auto c_open = csv.column(schema.column_for("open"));
  const auto c_high = csv.column(schema.column_for("high"));
  const auto c_low = csv.column(schema.column_for("low"));
  const auto c_close = csv.column(schema.column_for("close"));

  std::vector<DailyBar> bars;
  while (csv.next()) {
    DailyBar b;
    try {
      b.date = parse_date(csv.field(c_date));
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    b.open = csv.number(c_open);
    b.high = csv.number(c_high);
    b.low = csv.number(c_low);
    b.close = csv.number(c_close);
    try {
      check_daily(b, "bar");
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    if (!bars.empty() && b.date <= bars.back().date) csv.fail("date is not after the previous row");
    bars.push_back(b);
  }
  return bars;
}

ChainMap load_option_quotes(const std::filesystem::path& path, const CsvSchema& schema) {
  CsvReader csv(path);
  const auto c_ts = csv.column(schema.column_for("timestamp"));
  const auto c_exp = csv.column(schema.column_for("expiry"));
  const auto c_strike = csv.column(schema.column_for("strike"));
  const auto c_bid = csv.column(schema.column_for("bid"));
  const auto c_ask = csv.column(schema.column_for("ask"));

  ChainMap chains;
  while (csv.next()) {
    QuoteTick q;
    Date expiry;
    try {
      q.timestamp = parse_timestamp(csv.field(c_ts));
      expiry = parse_date(csv.field(c_exp));
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    const double strike = csv.number(c_strike);
    q.bid = csv.number(c_bid);
    q.ask = csv.number(c_ask);
    if (!(strike > 0)) csv.fail("strike must be positive");
    if (!(q.bid >= 0)) csv.fail("bid must be nonnegative");
    if (q.bid > q.ask) csv.fail("bid > ask");
    chains[expiry].strikes[strike].push_back(q);
  }
  return chains;
}

Series load_series(const std::filesystem::path& path, const CsvSchema& schema) {
  CsvReader csv(path);
  const auto c_date = csv.column(schema.column_for("date"));
  const auto c_value = csv.column(schema.column_for("value"));
  Series out;
  while (csv.next()) {
    SeriesPoint p;
    try {
      p.date = parse_date(csv.field(c_date));
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    p.value = csv.number(c_value);
    if (!std::isfinite(p.value)) csv.fail("value must be finite");
    if (!out.empty() && p.date <= out.back().date) csv.fail("date is not after the previous row");
    out.push_back(p);
  }
  return out;
}

std::vector<DailyBar> resample_daily(std::span<const MinuteBar> bars, std::span<const Date> calendar) {
  if (bars.empty()) throw std::invalid_argument("resample_daily: no bars");
  std::vector<DailyBar> out;
  for (const MinuteBar& b : bars) {
    const Date d = date_of(b.timestamp);
    if (!calendar.empty() && !std::binary_search(calendar.begin(), calendar.end(), d)) continue;
    if (out.empty() || out.back().date != d) {
      out.push_back(DailyBar{d, b.open, b.high, b.low, b.close});
      continue;
    }
    DailyBar& day = out.back();
    day.high = std::max(day.high, b.high);
    day.low = std::min(day.low, b.low);
    day.close = b.close;
  }
  return out;
}

double rate_at(const Series& series, Date d) {
  if (series.empty()) throw std::invalid_argument("rate_at: empty series");
  auto it = std::upper_bound(series.begin(), series.end(), d,
                             [](Date x, const SeriesPoint& p) { return x < p.date; });
  if (it == series.begin()) {
    throw std::out_of_range("rate_at: " + format_date(d) + " precedes the first observation");
  }
  return std::prev(it)->value;
}

double rate_at_or(const Series& series, Date d, double fallback) {
  return series.empty() ? fallback : rate_at(series, d);
}

}  // namespace putwrite::market
