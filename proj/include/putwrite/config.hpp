#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "putwrite/backtester.hpp"

namespace putwrite::config {

/// Sweep definition read from a `key = value` file. List-valued keys take
/// comma-separated values; every combination becomes one StrategyConfig.
struct GridSpec {
  std::filesystem::path data;  // dataset manifest, relative to the config file
  backtest::Sizing sizing = backtest::Sizing::Kelly;
  std::vector<int> dte{0, 1, 3, 5};
  std::vector<double> otm{0, 2, 5, 10};
  std::vector<vol::Estimator> estimators{vol::Estimator::CloseToClose, vol::Estimator::GarmanKlass,
                                         vol::Estimator::YangZhang};
  std::vector<int> estimator_memory{3, 5, 10, 21, 63};
  std::vector<backtest::VixSource> vix{backtest::VixSource::Vix9d, backtest::VixSource::Vix30d};
  std::vector<int> vix_memory{21, 42, 63, 84, 126, 252};
  backtest::VixTiming vix_timing = backtest::VixTiming::PriorClose;
  backtest::KellySettings kelly;
  backtest::CostModel costs;
  double start_capital = 5'000'000.0;
  std::uint64_t seed = 0;
  std::optional<Date> first_day;
  std::optional<Date> last_day;
};

/// Keys in `text` override the matching fields of `initial`. `data` may be
/// left empty here; load_grid_spec requires it.
GridSpec parse_grid_spec(const std::string& text, const std::filesystem::path& base_dir = {},
                         const std::string& source = "<config>", GridSpec initial = {});
GridSpec load_grid_spec(const std::filesystem::path& file, GridSpec initial = {});

/// Defaults for a single backtest: one value per axis.
GridSpec single_run_defaults();

/// Cartesian product in the order dte, otm, estimator, memory, vix, vix memory
/// (axes unused by the sizing rule are skipped).
std::vector<backtest::StrategyConfig> expand(const GridSpec& spec);

/// Single config from the same keys; list values must then hold one element.
backtest::StrategyConfig single_config(const GridSpec& spec);

}  // namespace putwrite::config
