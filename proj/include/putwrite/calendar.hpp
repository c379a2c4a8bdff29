#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace putwrite {

/// Calendar date in the exchange timezone.
using Date = std::chrono::sys_days;

/// Wall-clock instant in the exchange timezone, second resolution. No UTC
/// conversion is ever applied; "09:45" always means 09:45 exchange time.
using Timestamp = std::chrono::sys_seconds;

Date parse_date(std::string_view text);

/// Accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DD HH:MM:SS" and the ISO 'T' separator.
Timestamp parse_timestamp(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(Timestamp ts);

inline Date date_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

/// Regular trading session; defaults to 09:30-16:00.
struct Session {
  std::chrono::minutes open{9 * 60 + 30};
  std::chrono::minutes close{16 * 60};

  Timestamp open_at(Date d) const { return Timestamp{d} + open; }
  Timestamp close_at(Date d) const { return Timestamp{d} + close; }

  /// Fraction of the session still ahead of `ts`, clamped to [0, 1].
  double remaining_fraction(Timestamp ts) const;

  bool operator==(const Session&) const = default;
};

/// Sorted list of trading dates. DTE is counted in trading days.
class TradingCalendar {
 public:
  TradingCalendar() = default;
  explicit TradingCalendar(std::vector<Date> days);

  const std::vector<Date>& days() const { return days_; }
  bool empty() const { return days_.empty(); }
  std::size_t size() const { return days_.size(); }

  std::optional<std::size_t> index_of(Date d) const;

  /// Number of trading days in (from, to]; negative when `to` precedes `from`.
  int trading_days_between(Date from, Date to) const;

  /// Weekdays starting at `first` (or the next weekday), `count` of them.
  static TradingCalendar weekdays(Date first, std::size_t count);

 private:
  std::vector<Date> days_;
};

}  // namespace putwrite
