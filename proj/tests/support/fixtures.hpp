#pragma once

#include <chrono>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>

#include "putwrite/market_data.hpp"

namespace fixture {

using namespace putwrite;
using namespace std::chrono_literals;

inline Date ymd(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y} / m / d}; }

inline Timestamp at(Date d, std::chrono::minutes since_midnight) { return Timestamp{d} + since_midnight; }

constexpr std::chrono::minutes kDecision = 9h + 45min;
constexpr std::chrono::minutes kClose = 16h;

// Hand-made market: a few index bars per day and explicit option quotes.
struct HandMarket {
  market::MarketDataset data;

  explicit HandMarket(std::initializer_list<Date> days) {
    data.calendar.assign(days.begin(), days.end());
  }

  void bar(Timestamp ts, double price) {
    data.index_bars.push_back({ts, price, price, price, price, price - 0.05, price + 0.05});
  }

  void quote(Date expiry, double strike, Timestamp ts, double bid, double ask) {
    data.chains[expiry].strikes[strike].push_back({ts, bid, ask});
  }

  market::MarketDataset finish() {
    data.daily_bars = market::resample_daily(data.index_bars);
    data.finalize();
    return data;
  }
};

// Flat-vol synthetic market, small enough for unit tests.
inline market::SynthSpec small_spec(int days = 60) {
  market::SynthSpec s;
  s.n_days = days;
  s.bars_per_day = 26;  // 15-minute bars
  s.substeps = 4;
  s.expiry_ladder = {0, 1, 2, 3, 4, 5, 6, 7};
  s.quote_offsets = {15, 390};
  s.strike_range = 0.12;
  s.iv_vol_of_vol = 0.05;
  return s;
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("putwrite_test_" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
