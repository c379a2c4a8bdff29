#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "putwrite/backtester.hpp"

namespace putwrite::report {

/// One line of the results table. Percent columns hold fractions x 100.
struct GridTableRow {
  std::string id;
  std::string sizing;
  int dte = 0;
  double otm_pct = 0.0;
  std::string estimator;  // empty for vixrank
  std::optional<int> estimator_memory;
  std::string vix;  // empty for kelly
  std::optional<int> vix_memory;

  std::optional<double> arc_pct;
  std::optional<double> asd_pct;
  std::optional<double> md_pct;
  std::optional<double> mld_years;
  bool mld_open = false;
  std::optional<double> ir;
  std::optional<double> var_pct;
  std::optional<double> cvar_pct;
  std::int64_t n = 0;
  std::optional<double> psr;
  std::string stars;
  std::string error;

  bool operator==(const GridTableRow&) const = default;
};

GridTableRow make_row(const backtest::GridRun& run);

void write_results_csv(const std::filesystem::path& file, std::span<const GridTableRow> rows);
std::vector<GridTableRow> read_results_csv(const std::filesystem::path& file);
void write_results_json(const std::filesystem::path& file, std::span<const GridTableRow> rows);

/// Full record of one run: config, metrics, ledger and equity curve.
std::string run_record_json(const backtest::GridRun& run);

/// Daily equity curve as "timestamp,equity" CSV text.
std::string equity_csv(const backtest::BacktestResult& result);

enum class PivotValue { IR, ARC };

PivotValue parse_pivot_value(std::string_view text);

/// Rectangular heatmap: rows are the sizing-parameter combinations, columns
/// the DTE x %OTM pairs. Cells without a successful run are gaps.
struct HeatmapPivot {
  std::string value_name;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][col]
  std::vector<std::vector<std::string>> stars;            // [row][col]

  std::size_t n_rows() const { return row_labels.size(); }
  std::size_t n_cols() const { return col_labels.size(); }
};

HeatmapPivot make_pivot(std::span<const GridTableRow> rows, PivotValue value);

/// Cell values at full precision; empty field for a gap.
std::string pivot_csv(const HeatmapPivot& pivot);
HeatmapPivot parse_pivot_csv(const std::string& text);

/// Diverging scale: lowest value blue (#2166ac), midpoint of the value range
/// white (#f7f7f7), highest red (#b2182b). Labels show 2 decimals plus stars;
/// gaps are hatched grey.
std::string pivot_svg(const HeatmapPivot& pivot);

/// Writes `<stem>.csv`, `<stem>_stars.csv` and `<stem>.svg` into `dir`.
void emit_heatmap(const HeatmapPivot& pivot, const std::filesystem::path& dir, const std::string& stem);

}  // namespace putwrite::report
