#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "putwrite/calendar.hpp"
#include "putwrite/csv.hpp"
#include "putwrite/market_data.hpp"
#include "putwrite/pricing.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace putwrite;
using namespace putwrite::market;
using fixture::at;
using fixture::ymd;
using namespace std::chrono_literals;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST(Calendar, ParseAndFormatRoundTrip) {
  EXPECT_EQ(format_date(parse_date("2024-02-29")), "2024-02-29");
  EXPECT_EQ(format_timestamp(parse_timestamp("2024-03-01 09:45")), "2024-03-01 09:45:00");
  EXPECT_EQ(parse_timestamp("2024-03-01T09:45:30"), parse_timestamp("2024-03-01 09:45:30"));
  EXPECT_THROW(parse_date("2023-02-29"), std::invalid_argument);
  EXPECT_THROW(parse_date("2023-13-01"), std::invalid_argument);
  EXPECT_THROW(parse_timestamp("2023-01-01 25:00"), std::invalid_argument);
}

TEST(Calendar, SessionRemainingFraction) {
  Session s;
  const Date d = ymd(2024, 1, 2);
  EXPECT_DOUBLE_EQ(s.remaining_fraction(s.open_at(d)), 1.0);
  EXPECT_DOUBLE_EQ(s.remaining_fraction(s.close_at(d)), 0.0);
  EXPECT_DOUBLE_EQ(s.remaining_fraction(s.open_at(d) + 195min), 0.5);
}

TEST(Calendar, TradingDaysBetween) {
  const auto cal = TradingCalendar::weekdays(ymd(2024, 1, 5), 6);  // Fri .. next Fri
  ASSERT_EQ(cal.size(), 6u);
  EXPECT_EQ(cal.days()[1], ymd(2024, 1, 8));
  EXPECT_EQ(cal.trading_days_between(ymd(2024, 1, 5), ymd(2024, 1, 5)), 0);
  EXPECT_EQ(cal.trading_days_between(ymd(2024, 1, 5), ymd(2024, 1, 8)), 1);
  EXPECT_EQ(cal.trading_days_between(ymd(2024, 1, 5), ymd(2024, 1, 12)), 5);
  EXPECT_EQ(cal.trading_days_between(ymd(2024, 1, 12), ymd(2024, 1, 5)), -5);
}

TEST(Loaders, MinuteBarsWellFormed) {
  fixture::TempDir dir;
  write(dir / "bars.csv",
        "timestamp,open,high,low,close,bid,ask\n"
        "2024-01-02 09:31,100,101,99,100.5,100.4,100.6\n"
        "2024-01-02 09:32,100.5,101,100,100.8,100.7,100.9\n"
        "2024-01-02 09:33,100.8,102,100.5,101,100.9,101.1\n");
  const auto bars = load_minute_bars(dir / "bars.csv", CsvSchema::minute_bars());
  ASSERT_EQ(bars.size(), 3u);
  EXPECT_LT(bars[0].timestamp, bars[1].timestamp);
  EXPECT_LT(bars[1].timestamp, bars[2].timestamp);
  EXPECT_DOUBLE_EQ(bars[2].high, 102.0);
}

TEST(Loaders, BidAboveAskNamesRow) {
  fixture::TempDir dir;
  write(dir / "bars.csv",
        "timestamp,open,high,low,close,bid,ask\n"
        "2024-01-02 09:31,100,101,99,100.5,100.4,100.6\n"
        "2024-01-02 09:32,100.5,101,100,100.8,101.0,100.9\n");
  try {
    load_minute_bars(dir / "bars.csv", CsvSchema::minute_bars());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Loaders, ShuffledTimestampsRejected) {
  fixture::TempDir dir;
  write(dir / "bars.csv",
        "timestamp,open,high,low,close,bid,ask\n"
        "2024-01-02 09:32,100,101,99,100.5,100.4,100.6\n"
        "2024-01-02 09:31,100.5,101,100,100.8,100.7,100.9\n");
  EXPECT_THROW(load_minute_bars(dir / "bars.csv", CsvSchema::minute_bars()), DataError);
}

TEST(Loaders, SchemaMapsColumns) {
  fixture::TempDir dir;
  write(dir / "vix.csv", "Day,Close\n2024-01-02,13.2\n2024-01-03,14.1\n");
  CsvSchema schema{{{"date", "Day"}, {"value", "Close"}}};
  const auto s = load_series(dir / "vix.csv", schema);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[1].value, 14.1);
  EXPECT_THROW(load_series(dir / "vix.csv", CsvSchema::series()), DataError);
}

TEST(Resample, ConstantDay) {
  std::vector<MinuteBar> bars;
  for (int m = 1; m <= 5; ++m) bars.push_back({at(ymd(2024, 1, 2), 9h + 30min + std::chrono::minutes(m)), 100, 100, 100, 100, 99.9, 100.1});
  const auto d = resample_daily(bars);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], (DailyBar{ymd(2024, 1, 2), 100, 100, 100, 100}));
}

TEST(Resample, TwoDaysMatchBruteForce) {
  std::vector<MinuteBar> bars;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Date d : {ymd(2024, 1, 2), ymd(2024, 1, 3)}) {
    double p = 100;
    for (int m = 1; m <= 30; ++m) {
      const double o = p;
      p += u(gen);
      const double h = std::max(o, p) + std::abs(u(gen));
      const double l = std::min(o, p) - std::abs(u(gen));
      bars.push_back({at(d, 9h + 30min + std::chrono::minutes(m)), o, h, l, p, p - 0.1, p + 0.1});
    }
  }
  const auto daily = resample_daily(bars);
  ASSERT_EQ(daily.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    double hi = -1e300, lo = 1e300;
    for (std::size_t i = 30 * k; i < 30 * (k + 1); ++i) {
      hi = std::max(hi, bars[i].high);
      lo = std::min(lo, bars[i].low);
    }
    EXPECT_EQ(daily[k].high, hi);
    EXPECT_EQ(daily[k].low, lo);
    EXPECT_EQ(daily[k].open, bars[30 * k].open);
    EXPECT_EQ(daily[k].close, bars[30 * k + 29].close);
  }
}

TEST(Resample, SingleBarDay) {
  std::vector<MinuteBar> bars{{at(ymd(2024, 1, 2), 10h), 100, 103, 98, 101, 100.9, 101.1}};
  const auto d = resample_daily(bars);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], (DailyBar{ymd(2024, 1, 2), 100, 103, 98, 101}));
}

TEST(Series, RateAtStepLookup) {
  Series s{{ymd(2024, 1, 2), 0.05}, {ymd(2024, 1, 10), 0.04}};
  EXPECT_DOUBLE_EQ(rate_at(s, ymd(2024, 1, 2)), 0.05);
  EXPECT_DOUBLE_EQ(rate_at(s, ymd(2024, 1, 9)), 0.05);
  EXPECT_DOUBLE_EQ(rate_at(s, ymd(2024, 1, 10)), 0.04);
  EXPECT_THROW(rate_at(s, ymd(2024, 1, 1)), std::out_of_range);
  EXPECT_DOUBLE_EQ(rate_at_or({}, ymd(2024, 1, 1), 0.0), 0.0);
}

TEST(Synth, DeterministicForSeed) {
  const auto spec = fixture::small_spec(15);
  EXPECT_TRUE(synthesize_market(spec, 11) == synthesize_market(spec, 11));
  EXPECT_FALSE(synthesize_market(spec, 11) == synthesize_market(spec, 12));
}

TEST(Synth, ZeroVolIsFlatAndQuotesAreBsm) {
  auto spec = fixture::small_spec(5);
  spec.sigma = 0.0;
  spec.index_half_spread = 0.0;
  const auto data = synthesize_market(spec, 1);
  for (const auto& b : data.index_bars) {
    EXPECT_EQ(b.close, spec.spot);
    EXPECT_EQ(b.high, spec.spot);
  }
  const auto& [expiry, chain] = *data.chains.begin();
  for (const auto& [strike, ticks] : chain.strikes) {
    for (const auto& t : ticks) {
      const int dte = data.trading_calendar().trading_days_between(date_of(t.timestamp), expiry);
      const double tau = (dte + data.session.remaining_fraction(t.timestamp)) / 252.0;
      const double v = pricing::bsm_put_price({spec.spot, strike, spec.rate, spec.dividend, spec.implied_vol, tau});
      EXPECT_NEAR(0.5 * (t.bid + t.ask), v, 1e-10 * std::max(v, 1.0));
    }
  }
}

TEST(Synth, QuotesMatchBsmAtDailyImpliedVol) {
  const auto spec = fixture::small_spec(12);
  const auto data = synthesize_market(spec, 5);
  const auto cal = data.trading_calendar();
  std::size_t checked = 0;
  for (const auto& [expiry, chain] : data.chains) {
    for (const auto& [strike, ticks] : chain.strikes) {
      for (const auto& t : ticks) {
        const Date d = date_of(t.timestamp);
        const double iv = rate_at(data.vix9d, d) / 100.0;
        // spot at the quote is the close of the bar ending at the quote time
        auto it = std::lower_bound(data.index_bars.begin(), data.index_bars.end(), t.timestamp,
                                   [](const MinuteBar& b, Timestamp ts) { return b.timestamp < ts; });
        ASSERT_NE(it, data.index_bars.end());
        ASSERT_EQ(it->timestamp, t.timestamp);
        const double tau = (cal.trading_days_between(d, expiry) + data.session.remaining_fraction(t.timestamp)) / 252.0;
        const double v = pricing::bsm_put_price({it->close, strike, spec.rate, spec.dividend, iv, tau});
        const double mid = 0.5 * (t.bid + t.ask);
        EXPECT_LE(t.bid, mid);
        EXPECT_LE(mid, t.ask);
        EXPECT_NEAR(mid, v, 1e-10 * std::max(v, 1e-300));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Synth, ResampleReproducesDailyBars) {
  const auto data = synthesize_market(fixture::small_spec(10), 9);
  EXPECT_EQ(resample_daily(data.index_bars), data.daily_bars);
}

TEST(Synth, DailyVolatilityOverLongSample) {
  SynthSpec s;
  s.n_days = 100'000;
  s.bars_per_day = 1;
  s.sigma = 0.2;
  s.expiry_ladder = {0};
  s.strike_range = 0.0;
  s.quote_offsets = {390};
  const auto data = synthesize_market(s, 2024);
  std::vector<double> r;
  for (std::size_t i = 1; i < data.daily_bars.size(); ++i)
    r.push_back(std::log(data.daily_bars[i].close / data.daily_bars[i - 1].close));
  const double sigma = std::sqrt(oracle::two_pass_variance(r) * 252.0);
  EXPECT_NEAR(sigma, 0.2, 0.01 * 0.2);
}

TEST(Dataset, SaveLoadRoundTrip) {
  fixture::TempDir dir;
  auto spec = fixture::small_spec(8);
  spec.rate = 0.0312345678901;
  const auto data = synthesize_market(spec, 77);
  save_dataset(data, dir.path());
  const auto back = load_dataset(dir / "manifest.json");
  EXPECT_EQ(back.calendar, data.calendar);
  EXPECT_EQ(back.index_bars, data.index_bars);
  EXPECT_EQ(back.daily_bars, data.daily_bars);
  EXPECT_EQ(back.chains, data.chains);
  EXPECT_EQ(back.vix9d, data.vix9d);
  EXPECT_EQ(back.risk_free, data.risk_free);
  EXPECT_TRUE(back == data);
}

TEST(Dataset, BadManifestIsDataError) {
  fixture::TempDir dir;
  write(dir / "manifest.json", "{ not json");
  EXPECT_THROW(load_dataset(dir / "manifest.json"), DataError);
  EXPECT_THROW(load_dataset(dir / "missing.json"), DataError);
}

TEST(Dataset, QueriesOnHandMarket) {
  const Date d1 = ymd(2024, 1, 2), d2 = ymd(2024, 1, 3);
  fixture::HandMarket m{d1, d2};
  m.bar(at(d1, fixture::kDecision), 4000);
  m.bar(at(d1, fixture::kClose), 4000);
  m.bar(at(d2, fixture::kDecision), 4000);
  m.bar(at(d2, fixture::kClose), 4000);
  m.quote(d2, 3900, at(d1, fixture::kDecision), 1.0, 1.2);
  m.quote(d2, 3925, at(d1, fixture::kDecision), 1.5, 1.7);
  m.quote(d2, 3900, at(d1, fixture::kClose), 0.8, 1.0);
  const auto data = m.finish();
  EXPECT_EQ(data.tradable_expiries(d1, at(d1, fixture::kDecision)), std::vector<Date>{d2});
  EXPECT_TRUE(data.tradable_expiries(d1, at(d1, 10h)).empty());
  EXPECT_EQ(data.strikes_at(d2, at(d1, fixture::kDecision)), (std::vector<double>{3900, 3925}));
  const auto q = data.latest_quote(d2, 3900, at(d1, 9h + 30min), at(d1, fixture::kClose));
  ASSERT_TRUE(q);
  EXPECT_DOUBLE_EQ(q->mid(), 0.9);
  EXPECT_FALSE(data.quote_at(d2, 3925, at(d1, fixture::kClose)));
}
