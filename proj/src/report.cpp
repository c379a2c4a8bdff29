#include "putwrite/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "putwrite/csv.hpp"

namespace putwrite::report {

using nlohmann::json;

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

json opt_json(const std::optional<double>& v) { return v && std::isfinite(*v) ? json(*v) : json(nullptr); }
json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

const char* const kHeader[] = {"id",      "sizing",   "dte",     "otm_pct",   "estimator", "estimator_memory",
                               "vix",     "vix_memory", "arc_pct", "asd_pct", "md_pct",    "mld_years",
                               "mld_open", "ir",      "var_pct", "cvar_pct",  "n",         "psr",
                               "stars",   "error"};

}  // namespace

GridTableRow make_row(const backtest::GridRun& run) {
  const auto& c = run.config;
  GridTableRow row;
  row.id = c.id();
  row.sizing = std::string(backtest::to_string(c.sizing));
  row.dte = c.target_dte;
  row.otm_pct = c.otm_pct;
  if (c.estimator) {
    row.estimator = std::string(vol::to_string(c.estimator->kind));
    row.estimator_memory = c.estimator->memory;
  }
  if (c.vix) {
    row.vix = std::string(backtest::to_string(c.vix->source));
    row.vix_memory = c.vix->memory;
  }
  row.error = sanitize(run.error);
  if (run.result) row.n = run.result->n_positions;
  if (run.report) {
    const auto& m = *run.report;
    row.arc_pct = 100.0 * m.arc;
    row.asd_pct = 100.0 * m.asd;
    row.md_pct = 100.0 * m.md;
    row.mld_years = m.mld.years;
    row.mld_open = m.mld.open_drawdown;
    row.ir = m.ir.value;
    row.var_pct = 100.0 * m.tail.var;
    row.cvar_pct = 100.0 * m.tail.cvar;
    if (m.psr.defined) row.psr = m.psr.probability;
    row.stars = metrics::significance_stars(m.psr);
  }
  return row;
}

void write_results_csv(const std::filesystem::path& file, std::span<const GridTableRow> rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kHeader); ++i) out << (i ? "," : "") << kHeader[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.id << ',' << r.sizing << ',' << r.dte << ',' << format_double(r.otm_pct) << ',' << r.estimator << ','
        << opt_int(r.estimator_memory) << ',' << r.vix << ',' << opt_int(r.vix_memory) << ',' << opt_num(r.arc_pct)
        << ',' << opt_num(r.asd_pct) << ',' << opt_num(r.md_pct) << ',' << opt_num(r.mld_years) << ','
        << (r.mld_open ? "true" : "false") << ',' << opt_num(r.ir) << ',' << opt_num(r.var_pct) << ','
        << opt_num(r.cvar_pct) << ',' << r.n << ',' << opt_num(r.psr) << ',' << r.stars << ',' << r.error << '\n';
  }
  write_text(file, out.str());
}

std::vector<GridTableRow> read_results_csv(const std::filesystem::path& file) {
  CsvReader in(file);
  std::vector<std::size_t> col;
  for (const char* name : kHeader) col.push_back(in.column(name));
  auto num = [&](std::size_t k) -> std::optional<double> {
    if (in.field(col[k]).empty()) return std::nullopt;
    return in.number(col[k]);
  };
  auto integer = [&](std::size_t k) -> std::optional<int> {
    const auto v = num(k);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v)) in.fail(std::string(kHeader[k]) + " must be an integer");
    return static_cast<int>(*v);
  };
  std::vector<GridTableRow> rows;
  while (in.next()) {
    GridTableRow r;
    r.id = in.field(col[0]);
    r.sizing = in.field(col[1]);
    const auto dte = integer(2);
    if (!dte) in.fail("dte is required");
    r.dte = *dte;
    const auto otm = num(3);
    if (!otm) in.fail("otm_pct is required");
    r.otm_pct = *otm;
    r.estimator = in.field(col[4]);
    r.estimator_memory = integer(5);
    r.vix = in.field(col[6]);
    r.vix_memory = integer(7);
    r.arc_pct = num(8);
    r.asd_pct = num(9);
    r.md_pct = num(10);
    r.mld_years = num(11);
    const auto& open = in.field(col[12]);
    if (open != "true" && open != "false") in.fail("mld_open must be true or false");
    r.mld_open = open == "true";
    r.ir = num(13);
    r.var_pct = num(14);
    r.cvar_pct = num(15);
    const auto n = num(16);
    r.n = n ? static_cast<std::int64_t>(*n) : 0;
    r.psr = num(17);
    r.stars = in.field(col[18]);
    r.error = in.field(col[19]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_results_json(const std::filesystem::path& file, std::span<const GridTableRow> rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"id", r.id},
                   {"sizing", r.sizing},
                   {"dte", r.dte},
                   {"otm_pct", r.otm_pct},
                   {"estimator", r.estimator.empty() ? json(nullptr) : json(r.estimator)},
                   {"estimator_memory", opt_json(r.estimator_memory)},
                   {"vix", r.vix.empty() ? json(nullptr) : json(r.vix)},
                   {"vix_memory", opt_json(r.vix_memory)},
                   {"arc_pct", opt_json(r.arc_pct)},
                   {"asd_pct", opt_json(r.asd_pct)},
                   {"md_pct", opt_json(r.md_pct)},
                   {"mld_years", opt_json(r.mld_years)},
                   {"mld_open", r.mld_open},
                   {"ir", opt_json(r.ir)},
                   {"var_pct", opt_json(r.var_pct)},
                   {"cvar_pct", opt_json(r.cvar_pct)},
                   {"n", r.n},
                   {"psr", opt_json(r.psr)},
                   {"stars", r.stars},
                   {"error", r.error.empty() ? json(nullptr) : json(r.error)}});
  }
  write_text(file, arr.dump(2) + "\n");
}

std::string run_record_json(const backtest::GridRun& run) {
  const auto& c = run.config;
  json cfg = {{"id", c.id()},
              {"sizing", std::string(backtest::to_string(c.sizing))},
              {"target_dte", c.target_dte},
              {"otm_pct", c.otm_pct},
              {"vix_timing", std::string(backtest::to_string(c.vix_timing))},
              {"n_paths", c.kelly.n_paths},
              {"f_max", c.kelly.f_max},
              {"drift_override", c.kelly.drift_override ? json(*c.kelly.drift_override) : json(nullptr)},
              {"commission", c.costs.commission_per_contract},
              {"spread_cross", c.costs.spread_cross_fraction},
              {"start_capital", c.start_capital},
              {"seed", c.seed}};
  cfg["estimator"] = c.estimator ? json{{"kind", std::string(vol::to_string(c.estimator->kind))},
                                        {"memory", c.estimator->memory}}
                                 : json(nullptr);
  cfg["vix"] = c.vix ? json{{"source", std::string(backtest::to_string(c.vix->source))}, {"memory", c.vix->memory}}
                     : json(nullptr);
  cfg["first_day"] = c.first_day ? json(format_date(*c.first_day)) : json(nullptr);
  cfg["last_day"] = c.last_day ? json(format_date(*c.last_day)) : json(nullptr);

  json rec = {{"config", cfg}, {"error", run.error.empty() ? json(nullptr) : json(run.error)}};
  if (run.report) {
    const auto& m = *run.report;
    rec["metrics"] = {{"n_returns", m.n_returns},
                      {"arc", m.arc},
                      {"asd", m.asd},
                      {"md", m.md},
                      {"mld_days", m.mld.days},
                      {"mld_years", m.mld.years},
                      {"mld_open", m.mld.open_drawdown},
                      {"ir", std::isfinite(m.ir.value) ? json(m.ir.value) : json(nullptr)},
                      {"ir_unbounded", m.ir.unbounded},
                      {"var", m.tail.var},
                      {"cvar", m.tail.cvar},
                      {"skew", opt_json(m.skew)},
                      {"kurtosis", opt_json(m.kurtosis)},
                      {"benchmark_sharpe", m.benchmark_sharpe},
                      {"sharpe", m.psr.defined ? json(m.psr.sharpe) : json(nullptr)},
                      {"psr", m.psr.defined ? json(m.psr.probability) : json(nullptr)},
                      {"stars", metrics::significance_stars(m.psr)}};
  }
  if (run.result) {
    const auto& r = *run.result;
    rec["n_positions"] = r.n_positions;
    rec["final_cash"] = r.final_cash;
    json trades = json::array();
    for (const auto& t : r.trades) {
      trades.push_back({{"time", format_timestamp(t.time)},
                        {"action", std::string(backtest::to_string(t.action))},
                        {"expiry", format_date(t.contract.expiry)},
                        {"strike", t.contract.strike},
                        {"qty", t.qty},
                        {"price", t.fill_price},
                        {"commission", t.commission},
                        {"realized_pnl", t.realized_pnl},
                        {"cash_delta", t.cash_delta},
                        {"spot", t.spot},
                        {"portfolio_value", t.portfolio_value},
                        {"margin", t.margin},
                        {"margin_breach", t.margin_breach}});
    }
    rec["trades"] = std::move(trades);
    json equity = json::array();
    for (const auto& p : r.equity_curve) equity.push_back({format_timestamp(p.time), p.value});
    rec["equity_curve"] = std::move(equity);
    rec["diagnostics"] = r.diagnostics;
  }
  return rec.dump(2) + "\n";
}

std::string equity_csv(const backtest::BacktestResult& result) {
  std::string out = "timestamp,equity\n";
  for (const auto& p : result.equity_curve) out += format_timestamp(p.time) + "," + format_double(p.value) + "\n";
  return out;
}

PivotValue parse_pivot_value(std::string_view text) {
  if (text == "ir" || text == "IR") return PivotValue::IR;
  if (text == "arc" || text == "aRC" || text == "ARC") return PivotValue::ARC;
  throw std::invalid_argument("unknown pivot value '" + std::string(text) + "' (expected ir or arc)");
}

namespace {

int estimator_rank(const std::string& name) {
  if (name.empty()) return -1;
  return static_cast<int>(vol::parse_estimator(name));
}

int vix_rank_of(const std::string& name) {
  if (name.empty()) return -1;
  return static_cast<int>(backtest::parse_vix_source(name));
}

using RowKey = std::tuple<int, int, int, int>;
using ColKey = std::tuple<int, double>;

std::string row_label(const GridTableRow& r) {
  std::string s;
  if (!r.estimator.empty()) s = r.estimator + " " + opt_int(r.estimator_memory);
  if (!r.vix.empty()) s += (s.empty() ? "" : " | ") + r.vix + " " + opt_int(r.vix_memory);
  return s.empty() ? std::string("all") : s;
}

std::string col_label(int dte, double otm) { return std::to_string(dte) + "d " + format_double(otm) + "%"; }

}  // namespace

HeatmapPivot make_pivot(std::span<const GridTableRow> rows, PivotValue value) {
  if (rows.empty()) throw std::invalid_argument("make_pivot: no rows");
  std::map<RowKey, std::string> row_keys;
  std::map<ColKey, std::string> col_keys;
  for (const auto& r : rows) {
    row_keys.emplace(RowKey{estimator_rank(r.estimator), r.estimator_memory.value_or(0), vix_rank_of(r.vix),
                            r.vix_memory.value_or(0)},
                     row_label(r));
    col_keys.emplace(ColKey{r.dte, r.otm_pct}, col_label(r.dte, r.otm_pct));
  }
  HeatmapPivot p;
  p.value_name = value == PivotValue::IR ? "ir" : "arc_pct";
  std::map<RowKey, std::size_t> row_index;
  std::map<ColKey, std::size_t> col_index;
  for (const auto& [k, label] : row_keys) {
    row_index[k] = p.row_labels.size();
    p.row_labels.push_back(label);
  }
  for (const auto& [k, label] : col_keys) {
    col_index[k] = p.col_labels.size();
    p.col_labels.push_back(label);
  }
  p.cells.assign(p.n_rows(), std::vector<std::optional<double>>(p.n_cols()));
  p.stars.assign(p.n_rows(), std::vector<std::string>(p.n_cols()));
  std::vector<std::vector<bool>> seen(p.n_rows(), std::vector<bool>(p.n_cols(), false));
  for (const auto& r : rows) {
    const auto i = row_index.at(RowKey{estimator_rank(r.estimator), r.estimator_memory.value_or(0),
                                       vix_rank_of(r.vix), r.vix_memory.value_or(0)});
    const auto j = col_index.at(ColKey{r.dte, r.otm_pct});
    if (seen[i][j]) throw std::invalid_argument("make_pivot: duplicate run " + r.id);
    seen[i][j] = true;
    p.cells[i][j] = value == PivotValue::IR ? r.ir : r.arc_pct;
    p.stars[i][j] = r.stars;
  }
  return p;
}

std::string pivot_csv(const HeatmapPivot& pivot) {
  std::string out = "row";
  for (const auto& c : pivot.col_labels) out += "," + c;
  out += "\n";
  for (std::size_t i = 0; i < pivot.n_rows(); ++i) {
    out += pivot.row_labels[i];
    for (std::size_t j = 0; j < pivot.n_cols(); ++j) out += "," + opt_num(pivot.cells[i][j]);
    out += "\n";
  }
  return out;
}

HeatmapPivot parse_pivot_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  HeatmapPivot p;
  if (!std::getline(in, line)) throw DataError("<pivot>", 0, "missing header row");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "row") throw DataError("<pivot>", 0, "first column must be 'row'");
  p.col_labels.assign(header.begin() + 1, header.end());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw DataError("<pivot>", row, "wrong number of fields");
    p.row_labels.push_back(fields[0]);
    std::vector<std::optional<double>> cells;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      if (fields[j].empty()) {
        cells.emplace_back();
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(fields[j].c_str(), &end);
      if (end != fields[j].c_str() + fields[j].size()) throw DataError("<pivot>", row, "bad number '" + fields[j] + "'");
      cells.emplace_back(v);
    }
    p.cells.push_back(std::move(cells));
  }
  p.stars.assign(p.n_rows(), std::vector<std::string>(p.n_cols()));
  return p;
}

namespace {

std::string mix(double t) {
  // blue -> white -> red
  const double lo[3] = {0x21, 0x66, 0xac}, mid[3] = {0xf7, 0xf7, 0xf7}, hi[3] = {0xb2, 0x18, 0x2b};
  t = std::clamp(t, 0.0, 1.0);
  double rgb[3];
  for (int k = 0; k < 3; ++k) {
    rgb[k] = t < 0.5 ? lo[k] + (mid[k] - lo[k]) * (t / 0.5) : mid[k] + (hi[k] - mid[k]) * ((t - 0.5) / 0.5);
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(rgb[0])),
                static_cast<int>(std::lround(rgb[1])), static_cast<int>(std::lround(rgb[2])));
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string pivot_svg(const HeatmapPivot& pivot) {
  if (pivot.n_rows() == 0 || pivot.n_cols() == 0) throw std::invalid_argument("pivot_svg: empty pivot");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : pivot.cells) {
    for (const auto& c : row) {
      if (c && std::isfinite(*c)) {
        lo = std::min(lo, *c);
        hi = std::max(hi, *c);
      }
    }
  }
  const int cw = 72, ch = 26, left = 150, top = 56;
  const int width = left + cw * static_cast<int>(pivot.n_cols()) + 10;
  const int height = top + ch * static_cast<int>(pivot.n_rows()) + 10;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#eeeeee\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#999999\" stroke-width=\"2\"/></pattern></defs>\n"
      << "<text x=\"4\" y=\"16\" font-size=\"13\">" << xml_escape(pivot.value_name) << "</text>\n";
  for (std::size_t j = 0; j < pivot.n_cols(); ++j) {
    svg << "<text x=\"" << left + cw * static_cast<int>(j) + cw / 2 << "\" y=\"" << top - 8
        << "\" text-anchor=\"middle\">" << xml_escape(pivot.col_labels[j]) << "</text>\n";
  }
  for (std::size_t i = 0; i < pivot.n_rows(); ++i) {
    const int y = top + ch * static_cast<int>(i);
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\">"
        << xml_escape(pivot.row_labels[i]) << "</text>\n";
    for (std::size_t j = 0; j < pivot.n_cols(); ++j) {
      const int x = left + cw * static_cast<int>(j);
      const auto& cell = pivot.cells[i][j];
      if (!cell) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
            << "\" fill=\"url(#hatch)\" stroke=\"#ffffff\"/>\n";
        continue;
      }
      double t = 0.5;
      if (!std::isfinite(*cell)) t = *cell > 0 ? 1.0 : 0.0;
      else if (hi > lo) t = (*cell - lo) / (hi - lo);
      char label[64];
      std::snprintf(label, sizeof label, "%.2f", *cell);
      const std::string stars = i < pivot.stars.size() && j < pivot.stars[i].size() ? pivot.stars[i][j] : "";
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
          << mix(t) << "\" stroke=\"#ffffff\"/>\n"
          << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"middle\">" << label
          << xml_escape(stars) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_heatmap(const HeatmapPivot& pivot, const std::filesystem::path& dir, const std::string& stem) {
  if (pivot.n_rows() == 0 || pivot.n_cols() == 0) throw std::invalid_argument("emit_heatmap: empty pivot");
  write_text(dir / (stem + ".csv"), pivot_csv(pivot));
  std::string stars = "row";
  for (const auto& c : pivot.col_labels) stars += "," + c;
  stars += "\n";
  for (std::size_t i = 0; i < pivot.n_rows(); ++i) {
    stars += pivot.row_labels[i];
    for (std::size_t j = 0; j < pivot.n_cols(); ++j) stars += "," + pivot.stars[i][j];
    stars += "\n";
  }
  write_text(dir / (stem + "_stars.csv"), stars);
  write_text(dir / (stem + ".svg"), pivot_svg(pivot));
}

}  // namespace putwrite::report
