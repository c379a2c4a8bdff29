#include "putwrite/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "putwrite/backtester.hpp"
#include "putwrite/config.hpp"
#include "putwrite/csv.hpp"
#include "putwrite/market_data.hpp"
#include "putwrite/report.hpp"

namespace putwrite::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError(file.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Config file (optional) followed by --set overrides, parsed as one text.
config::GridSpec load_spec(const std::string& config_file, const std::vector<std::string>& sets,
                           const std::string& data, config::GridSpec initial) {
  std::string text;
  fs::path base = fs::current_path();
  std::string source = "<command line>";
  if (!config_file.empty()) {
    text = read_file(config_file);
    base = fs::path(config_file).parent_path();
    source = config_file;
  }
  // overrides are relative to the working directory, not the config file
  for (const auto& s : sets) {
    if (s.find('=') == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
  }
  auto spec = config::parse_grid_spec(text, base, source, std::move(initial));
  if (!sets.empty() || !data.empty()) {
    std::string extra;
    for (const auto& s : sets) extra += s + "\n";
    if (!data.empty()) extra += "data = " + data + "\n";
    spec = config::parse_grid_spec(extra, fs::current_path(), "<command line>", std::move(spec));
  }
  if (spec.data.empty()) throw DataError(source, 0, "missing required key 'data'");
  return spec;
}

struct SynthArgs {
  fs::path out;
  std::uint64_t seed = 0;
  market::SynthSpec spec;
  std::string start;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  auto spec = a.spec;
  if (!a.start.empty()) spec.start = parse_date(a.start);
  const auto data = market::synthesize_market(spec, a.seed);
  market::save_dataset(data, a.out);
  out << json{{"manifest", (a.out / "manifest.json").string()},
              {"days", data.calendar.size()},
              {"expiries", data.chains.size()}}
             .dump()
      << "\n";
  return 0;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string data;
  fs::path out = ".";
  int jobs = 0;
};

int run_single(const RunArgs& a, std::ostream& out) {
  const auto spec = load_spec(a.config, a.sets, a.data, config::single_run_defaults());
  const auto cfg = config::single_config(spec);
  const auto data = market::load_dataset(spec.data);
  const auto rows = backtest::run_grid(std::span(&cfg, 1), data, 1);
  const auto& run = rows.front();
  if (!run.error.empty()) throw std::runtime_error(cfg.id() + ": " + run.error);
  const auto id = cfg.id();
  write_file(a.out / "runs" / (id + ".json"), report::run_record_json(run));
  write_file(a.out / "runs" / (id + "_equity.csv"), report::equity_csv(*run.result));
  const auto row = report::make_row(run);
  out << json{{"id", id},
              {"n_positions", row.n},
              {"final_equity", run.result->equity_curve.back().value},
              {"arc_pct", row.arc_pct.value_or(0.0)},
              {"ir", row.ir && std::isfinite(*row.ir) ? json(*row.ir) : json(nullptr)},
              {"stars", row.stars},
              {"record", (a.out / "runs" / (id + ".json")).string()}}
             .dump()
      << "\n";
  return 0;
}

int run_sweep(const RunArgs& a, std::ostream& out) {
  const auto spec = load_spec(a.config, a.sets, a.data, {});
  const auto configs = config::expand(spec);
  const auto data = market::load_dataset(spec.data);
  const int jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto runs = backtest::run_grid(configs, data, jobs);
  std::vector<report::GridTableRow> rows;
  std::size_t failed = 0;
  for (const auto& run : runs) {
    rows.push_back(report::make_row(run));
    if (!run.error.empty()) ++failed;
    write_file(a.out / "runs" / (run.config.id() + ".json"), report::run_record_json(run));
  }
  report::write_results_csv(a.out / "results.csv", rows);
  report::write_results_json(a.out / "results.json", rows);
  out << json{{"configs", runs.size()}, {"failed", failed}, {"results", (a.out / "results.csv").string()}}.dump()
      << "\n";
  return 0;
}

struct ReportArgs {
  fs::path results;
  std::vector<std::string> pivots{"ir", "arc"};
  fs::path out;
};

int run_report(const ReportArgs& a, std::ostream& out) {
  const auto rows = report::read_results_csv(a.results);
  if (rows.empty()) throw DataError(a.results.string(), 0, "no result rows");
  const fs::path dir = a.out.empty() ? a.results.parent_path() / "reports" : a.out;
  std::map<std::string, std::vector<report::GridTableRow>> by_sizing;
  for (const auto& r : rows) by_sizing[r.sizing].push_back(r);
  json written = json::array();
  for (const auto& name : a.pivots) {
    const auto value = report::parse_pivot_value(name);
    for (const auto& [sizing, group] : by_sizing) {
      const auto pivot = report::make_pivot(group, value);
      const std::string stem = sizing + "_" + name;
      report::emit_heatmap(pivot, dir, stem);
      written.push_back({{"file", (dir / (stem + ".csv")).string()},
                         {"rows", pivot.n_rows()},
                         {"cols", pivot.n_cols()}});
    }
  }
  out << json{{"pivots", written}}.dump() << "\n";
  return 0;
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message, const std::string& file = {},
                  std::size_t row = 0) {
  json e = {{"kind", kind}, {"message", message}};
  if (!file.empty()) e["file"] = file;
  if (row > 0) e["row"] = row;
  err << json{{"error", e}}.dump() << "\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Short-dated index put-writing backtester"};
  app.name(args.empty() ? "putwrite" : args.front());
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic market dataset");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--start", synth.start, "First calendar date (YYYY-MM-DD)");
  s->add_option("--days", synth.spec.n_days, "Trading days");
  s->add_option("--bars-per-day", synth.spec.bars_per_day, "Minute bars per session");
  s->add_option("--substeps", synth.spec.substeps, "GBM steps per bar");
  s->add_option("--spot", synth.spec.spot, "Initial index level");
  s->add_option("--sigma", synth.spec.sigma, "Realized index volatility (annual)");
  s->add_option("--drift", synth.spec.drift, "Index drift (annual)");
  s->add_option("--overnight", synth.spec.overnight_fraction, "Share of daily variance in the open gap");
  s->add_option("--implied-vol", synth.spec.implied_vol, "Long-run implied volatility");
  s->add_option("--iv-reversion", synth.spec.iv_mean_reversion, "Daily mean reversion of log implied vol");
  s->add_option("--vol-of-vol", synth.spec.iv_vol_of_vol, "Daily volatility of log implied vol");
  s->add_option("--rate", synth.spec.rate, "Risk-free rate");
  s->add_option("--dividend", synth.spec.dividend, "Dividend yield");
  s->add_option("--spread", synth.spec.spread_fraction, "Option bid/ask width as a fraction of mid");
  s->add_option("--ladder", synth.spec.expiry_ladder, "Listed DTEs")->delimiter(',');
  s->add_option("--strike-range", synth.spec.strike_range, "Strikes within spot*(1 +/- range)");

  RunArgs single;
  auto* b = app.add_subcommand("backtest", "Run one strategy configuration");
  b->add_option("--config", single.config, "key = value config file")->check(CLI::ExistingFile);
  b->add_option("--set", single.sets, "Override one config key (key=value); repeatable");
  b->add_option("--data", single.data, "Dataset manifest");
  b->add_option("--out", single.out, "Output directory");

  RunArgs sweep;
  auto* g = app.add_subcommand("grid", "Run a parameter sweep");
  g->add_option("--config", sweep.config, "key = value config file")->check(CLI::ExistingFile);
  g->add_option("--set", sweep.sets, "Override one config key (key=value); repeatable");
  g->add_option("--data", sweep.data, "Dataset manifest");
  g->add_option("--jobs", sweep.jobs, "Worker threads (default: hardware threads)");
  g->add_option("--out", sweep.out, "Output directory");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Pivot grid results into heatmaps");
  r->add_option("--results", rep.results, "results.csv written by grid")->required()->check(CLI::ExistingFile);
  r->add_option("--pivot", rep.pivots, "Cell value: ir and/or arc")->delimiter(',');
  r->add_option("--out", rep.out, "Output directory (default: <results dir>/reports)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what());
    return 2;
  }

  try {
    if (s->parsed()) return run_synth(synth, out);
    if (b->parsed()) return run_single(single, out);
    if (g->parsed()) return run_sweep(sweep, out);
    if (r->parsed()) return run_report(rep, out);
  } catch (const DataError& e) {
    error_record(err, "data", e.what(), e.file(), e.row());
    return 1;
  } catch (const std::exception& e) {
    error_record(err, "error", e.what());
    return 1;
  }
  return 2;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace putwrite::cli
