#include "putwrite/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace putwrite {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("malformed date/time: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("malformed date: '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{parse_int(text.substr(0, 4), text)},
                                        std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2), text))},
                                        std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2), text))}};
  if (!ymd.ok()) {
    throw std::invalid_argument("invalid calendar date: '" + std::string(text) + "'");
  }
  return Date{ymd};
}

Timestamp parse_timestamp(std::string_view text) {
  if (text.size() < 16 || (text[10] != ' ' && text[10] != 'T') || text[13] != ':') {
    throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
  }
  const Date d = parse_date(text.substr(0, 10));
  const int hh = parse_int(text.substr(11, 2), text);
  const int mm = parse_int(text.substr(14, 2), text);
  int ss = 0;
  if (text.size() > 16) {
    if (text.size() != 19 || text[16] != ':') {
      throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
    }
    ss = parse_int(text.substr(17, 2), text);
  }
  if (hh > 23 || mm > 59 || ss > 59 || hh < 0 || mm < 0 || ss < 0) {
    throw std::invalid_argument("time of day out of range: '" + std::string(text) + "'");
  }
  return Timestamp{d} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp ts) {
  const Date d = date_of(ts);
  const auto secs = (ts - Timestamp{d}).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, " %02lld:%02lld:%02lld", static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
  return format_date(d) + buf;
}

double Session::remaining_fraction(Timestamp ts) const {
  const Date d = date_of(ts);
  const double total = std::chrono::duration<double>(close - open).count();
  const double left = std::chrono::duration<double>(close_at(d) - ts).count();
  return std::clamp(left / total, 0.0, 1.0);
}

TradingCalendar::TradingCalendar(std::vector<Date> days) : days_(std::move(days)) {
  if (!std::is_sorted(days_.begin(), days_.end()) ||
      std::adjacent_find(days_.begin(), days_.end()) != days_.end()) {
    throw std::invalid_argument("trading calendar must be strictly increasing");
  }
}

std::optional<std::size_t> TradingCalendar::index_of(Date d) const {
  auto it = std::lower_bound(days_.begin(), days_.end(), d);
  if (it == days_.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - days_.begin());
}

int TradingCalendar::trading_days_between(Date from, Date to) const {
  const auto upto = [&](Date d) { return std::upper_bound(days_.begin(), days_.end(), d) - days_.begin(); };
  return static_cast<int>(upto(to) - upto(from));
}

TradingCalendar TradingCalendar::weekdays(Date first, std::size_t count) {
  std::vector<Date> days;
  days.reserve(count);
  for (Date d = first; days.size() < count; d += std::chrono::days{1}) {
    const std::chrono::weekday wd{d};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) days.push_back(d);
  }
  return TradingCalendar{std::move(days)};
}

}  // namespace putwrite
