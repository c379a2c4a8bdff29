#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "putwrite/csv.hpp"
#include "putwrite/market_data.hpp"

namespace putwrite::market {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "putwrite-dataset";

std::string format_minutes(std::chrono::minutes m) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(m.count() / 60), static_cast<int>(m.count() % 60));
  return buf;
}

std::chrono::minutes parse_minutes(const std::string& text) {
  int hh = 0, mm = 0;
  if (std::sscanf(text.c_str(), "%d:%d", &hh, &mm) != 2 || hh < 0 || hh > 23 || mm < 0 || mm > 59) {
    throw std::invalid_argument("malformed session time '" + text + "'");
  }
  return std::chrono::minutes{hh * 60 + mm};
}

json member(const std::string& file, const CsvSchema& schema) {
  return json{{"file", file}, {"columns", schema.columns}};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_series(const fs::path& path, const Series& s) {
  auto out = open_out(path);
  out << "date,value\n";
  for (const auto& p : s) out << format_date(p.date) << ',' << format_double(p.value) << '\n';
}

}  // namespace

void save_dataset(const MarketDataset& data, const fs::path& dir) {
  fs::create_directories(dir);

  {
    auto out = open_out(dir / "calendar.csv");
    out << "date\n";
    for (Date d : data.calendar) out << format_date(d) << '\n';
  }
  {
    auto out = open_out(dir / "index_bars.csv");
    out << "timestamp,open,high,low,close,bid,ask\n";
    for (const auto& b : data.index_bars) {
      out << format_timestamp(b.timestamp) << ',' << format_double(b.open) << ',' << format_double(b.high) << ','
          << format_double(b.low) << ',' << format_double(b.close) << ',' << format_double(b.bid) << ','
          << format_double(b.ask) << '\n';
    }
  }
  {
    auto out = open_out(dir / "daily_bars.csv");
    out << "date,open,high,low,close\n";
    for (const auto& b : data.daily_bars) {
      out << format_date(b.date) << ',' << format_double(b.open) << ',' << format_double(b.high) << ','
          << format_double(b.low) << ',' << format_double(b.close) << '\n';
    }
  }
  {
    auto out = open_out(dir / "option_quotes.csv");
    out << "timestamp,expiry,strike,bid,ask\n";
    for (const auto& [expiry, chain] : data.chains) {
      const std::string exp = format_date(expiry);
      for (const auto& [strike, ticks] : chain.strikes) {
        const std::string k = format_double(strike);
        for (const auto& q : ticks) {
          out << format_timestamp(q.timestamp) << ',' << exp << ',' << k << ',' << format_double(q.bid) << ','
              << format_double(q.ask) << '\n';
        }
      }
    }
  }
  write_series(dir / "vix9d.csv", data.vix9d);
  write_series(dir / "vix30d.csv", data.vix30d);
  write_series(dir / "risk_free.csv", data.risk_free);
  write_series(dir / "dividend_yield.csv", data.dividend_yield);

  json manifest{
      {"format", kFormat},
      {"version", 1},
      {"underlying", data.underlying},
      {"multiplier", data.multiplier},
      {"strike_grid", data.strike_grid},
      {"session", {{"open", format_minutes(data.session.open)}, {"close", format_minutes(data.session.close)}}},
      {"calendar", member("calendar.csv", CsvSchema{{{"date", "date"}}})},
      {"members",
       {{"index_bars", member("index_bars.csv", CsvSchema::minute_bars())},
        {"daily_bars", member("daily_bars.csv", CsvSchema::daily_bars())},
        {"option_quotes", member("option_quotes.csv", CsvSchema::option_quotes())},
        {"vix9d", member("vix9d.csv", CsvSchema::series())},
        {"vix30d", member("vix30d.csv", CsvSchema::series())},
        {"risk_free", member("risk_free.csv", CsvSchema::series())},
        {"dividend_yield", member("dividend_yield.csv", CsvSchema::series())}}},
  };
  auto out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

MarketDataset load_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError(manifest_path.string(), 0, "cannot open manifest");
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
  if (manifest.value("format", "") != kFormat) {
    throw DataError(manifest_path.string(), 0, "not a putwrite dataset manifest");
  }
  const fs::path base = manifest_path.parent_path();

  const auto resolve = [&](const json& m) -> std::pair<fs::path, CsvSchema> {
    fs::path file = m.at("file").get<std::string>();
    if (file.is_relative()) file = base / file;
    CsvSchema schema;
    schema.columns = m.at("columns").get<std::map<std::string, std::string>>();
    return {file, schema};
  };

  MarketDataset data;
  try {
    data.underlying = manifest.value("underlying", data.underlying);
    data.multiplier = manifest.value("multiplier", data.multiplier);
    data.strike_grid = manifest.value("strike_grid", data.strike_grid);
    if (manifest.contains("session")) {
      data.session.open = parse_minutes(manifest["session"].at("open").get<std::string>());
      data.session.close = parse_minutes(manifest["session"].at("close").get<std::string>());
    }
    if (manifest.contains("calendar")) {
      auto [file, schema] = resolve(manifest["calendar"]);
      CsvReader csv(file);
      const auto col = csv.column(schema.column_for("date"));
      while (csv.next()) {
        try {
          data.calendar.push_back(parse_date(csv.field(col)));
        } catch (const std::invalid_argument& e) {
          csv.fail(e.what());
        }
      }
    }
    const json& members = manifest.at("members");
    const auto has = [&](const char* key) { return members.contains(key); };
    if (has("index_bars")) {
      auto [file, schema] = resolve(members["index_bars"]);
      data.index_bars = load_minute_bars(file, schema);
    }
    if (has("daily_bars")) {
      auto [file, schema] = resolve(members["daily_bars"]);
      data.daily_bars = load_daily_bars(file, schema);
    } else if (!data.index_bars.empty()) {
      data.daily_bars = resample_daily(data.index_bars, data.calendar);
    }
    if (has("option_quotes")) {
      auto [file, schema] = resolve(members["option_quotes"]);
      data.chains = load_option_quotes(file, schema);
    }
    const std::pair<const char*, Series*> series[] = {{"vix9d", &data.vix9d},
                                                      {"vix30d", &data.vix30d},
                                                      {"risk_free", &data.risk_free},
                                                      {"dividend_yield", &data.dividend_yield}};
    for (auto [key, target] : series) {
      if (!has(key)) continue;
      auto [file, schema] = resolve(members[key]);
      *target = load_series(file, schema);
    }
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string(), 0, std::string("manifest schema violation: ") + e.what());
  }
  data.finalize();
  return data;
}

}  // namespace putwrite::market
