#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "putwrite/backtester.hpp"

namespace putwrite::backtest {

namespace {

GridRun run_one(const StrategyConfig& config, const MarketDataset& data) {
  GridRun row;
  row.config = config;
  try {
    auto result = run_backtest(config, data);
    const auto bench = buy_and_hold_benchmark(benchmark_closes(config, data), config.start_capital);
    const auto bench_returns = metrics::daily_returns(bench);
    const double sr_star = metrics::sharpe_ratio(bench_returns).value_or(0.0);
    row.report = metrics::evaluate(result.equity_values(), sr_star);
    row.result = std::move(result);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.report.reset();
  }
  return row;
}

}  // namespace

std::vector<GridRun> run_grid(std::span<const StrategyConfig> configs, const MarketDataset& data, int jobs) {
  if (configs.empty()) throw std::invalid_argument("run_grid: no configs");
  std::vector<GridRun> rows(configs.size());
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(configs.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) rows[i] = run_one(configs[i], data);
  };
  if (workers == 1) {
    work();
    return rows;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return rows;
}

}  // namespace putwrite::backtest
