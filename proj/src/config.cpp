#include "putwrite/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "putwrite/csv.hpp"

namespace putwrite::config {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (t.empty()) throw std::invalid_argument("empty list element");
    out.push_back(std::move(t));
  }
  if (out.empty()) throw std::invalid_argument("empty value");
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

template <class T, class F>
std::vector<T> list_of(const std::string& value, F convert) {
  std::vector<T> out;
  for (const auto& s : split_list(value)) out.push_back(convert(s));
  return out;
}

int to_int(const std::string& s) { return static_cast<int>(to_integer(s)); }

}  // namespace

GridSpec parse_grid_spec(const std::string& text, const std::filesystem::path& base_dir, const std::string& source,
                         GridSpec initial) {
  GridSpec spec = std::move(initial);
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw DataError(source, row, "expected 'key = value'");
    const auto key = trim(std::string_view(stripped).substr(0, eq));
    const auto value = trim(std::string_view(stripped).substr(eq + 1));
    try {
      if (key == "data") {
        if (value.empty()) throw std::invalid_argument("empty path");
        spec.data = std::filesystem::path(value).is_absolute() ? std::filesystem::path(value) : base_dir / value;
      } else if (key == "sizing") {
        spec.sizing = backtest::parse_sizing(value);
      } else if (key == "dte") {
        spec.dte = list_of<int>(value, to_int);
      } else if (key == "otm") {
        spec.otm = list_of<double>(value, to_double);
      } else if (key == "estimator") {
        spec.estimators = list_of<vol::Estimator>(value, [](const std::string& s) { return vol::parse_estimator(s); });
      } else if (key == "estimator_memory") {
        spec.estimator_memory = list_of<int>(value, to_int);
      } else if (key == "vix") {
        spec.vix = list_of<backtest::VixSource>(value, [](const std::string& s) { return backtest::parse_vix_source(s); });
      } else if (key == "vix_memory") {
        spec.vix_memory = list_of<int>(value, to_int);
      } else if (key == "vix_timing") {
        spec.vix_timing = backtest::parse_vix_timing(value);
      } else if (key == "n_paths") {
        spec.kelly.n_paths = to_int(value);
      } else if (key == "f_max") {
        spec.kelly.f_max = to_double(value);
      } else if (key == "drift_override") {
        if (value.empty() || value == "none") spec.kelly.drift_override.reset();
        else spec.kelly.drift_override = to_double(value);
      } else if (key == "seed") {
        spec.seed = static_cast<std::uint64_t>(std::stoull(value));
      } else if (key == "commission") {
        spec.costs.commission_per_contract = to_double(value);
      } else if (key == "spread_cross") {
        spec.costs.spread_cross_fraction = to_double(value);
      } else if (key == "start_capital") {
        spec.start_capital = to_double(value);
      } else if (key == "first_day") {
        spec.first_day = parse_date(value);
      } else if (key == "last_day") {
        spec.last_day = parse_date(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError(source, row, key + ": " + e.what());
    }
  }
  return spec;
}

GridSpec single_run_defaults() {
  GridSpec s;
  s.dte = {1};
  s.otm = {5};
  s.estimators = {vol::Estimator::GarmanKlass};
  s.estimator_memory = {21};
  s.vix = {backtest::VixSource::Vix9d};
  s.vix_memory = {63};
  return s;
}

GridSpec load_grid_spec(const std::filesystem::path& file, GridSpec initial) {
  std::ifstream in(file);
  if (!in) throw DataError(file.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto spec = parse_grid_spec(buf.str(), file.parent_path(), file.string(), std::move(initial));
  if (spec.data.empty()) throw DataError(file.string(), 0, "missing required key 'data'");
  return spec;
}

std::vector<backtest::StrategyConfig> expand(const GridSpec& spec) {
  using backtest::Sizing;
  std::vector<std::optional<vol::EstimatorChoice>> estimators;
  if (spec.sizing == Sizing::VixRank) {
    estimators.emplace_back();
  } else {
    for (auto e : spec.estimators)
      for (int m : spec.estimator_memory) estimators.emplace_back(vol::EstimatorChoice{e, m});
  }
  std::vector<std::optional<backtest::VixChoice>> vixes;
  if (spec.sizing == Sizing::Kelly) {
    vixes.emplace_back();
  } else {
    for (auto v : spec.vix)
      for (int m : spec.vix_memory) vixes.emplace_back(backtest::VixChoice{v, m});
  }
  std::vector<backtest::StrategyConfig> out;
  for (int dte : spec.dte) {
    for (double otm : spec.otm) {
      for (const auto& est : estimators) {
        for (const auto& vix : vixes) {
          backtest::StrategyConfig c;
          c.target_dte = dte;
          c.otm_pct = otm;
          c.sizing = spec.sizing;
          c.estimator = est;
          c.vix = vix;
          c.vix_timing = spec.vix_timing;
          c.kelly = spec.kelly;
          c.costs = spec.costs;
          c.start_capital = spec.start_capital;
          c.seed = spec.seed;
          c.first_day = spec.first_day;
          c.last_day = spec.last_day;
          c.validate();
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

backtest::StrategyConfig single_config(const GridSpec& spec) {
  auto all = expand(spec);
  if (all.size() != 1)
    throw std::invalid_argument("expected exactly one configuration, the axes expand to " + std::to_string(all.size()));
  return all.front();
}

}  // namespace putwrite::config
