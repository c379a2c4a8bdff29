#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "putwrite/metrics.hpp"
#include "putwrite/pricing.hpp"
#include "support/oracles.hpp"

using namespace putwrite::metrics;

namespace {

std::vector<double> random_curve(std::mt19937_64& gen, std::size_t n, double vol = 0.01) {
  std::normal_distribution<double> z(0.0002, vol);
  std::vector<double> v{100};
  while (v.size() < n) v.push_back(v.back() * std::exp(z(gen)));
  return v;
}

}  // namespace

TEST(Returns, HandCase) {
  const auto r = daily_returns(std::vector<double>{100, 110, 99});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], 0.1, 1e-15);
  EXPECT_NEAR(r[1], -0.1, 1e-15);
  EXPECT_THROW(daily_returns(std::vector<double>{100}), std::invalid_argument);
  EXPECT_THROW(daily_returns(std::vector<double>{100, 0}), std::invalid_argument);
}

TEST(Arc, HandCases) {
  EXPECT_NEAR(annualized_return(std::vector<double>(252, 0.0)), 0.0, 1e-15);
  // doubling over two years
  std::vector<double> r(504, std::pow(2.0, 1.0 / 504) - 1);
  EXPECT_NEAR(annualized_return(r), std::sqrt(2.0) - 1, 1e-12);
  EXPECT_NEAR(annualized_return(std::vector<double>{0.1, -0.1}, 2), 0.99 - 1, 1e-15);
}

TEST(Asd, MatchesTwoPass) {
  std::mt19937_64 gen(1);
  const auto r = daily_returns(random_curve(gen, 400));
  EXPECT_NEAR(annualized_stdev(r), std::sqrt(252 * oracle::two_pass_variance(r)), 1e-14);
  EXPECT_NEAR(annualized_stdev(std::vector<double>(10, 0.001)), 0.0, 1e-15);
}

TEST(Drawdown, HandCases) {
  EXPECT_NEAR(max_drawdown(std::vector<double>{100, 120, 90, 130}), 0.25, 1e-15);
  EXPECT_EQ(max_drawdown(std::vector<double>{100, 101, 102}), 0.0);
  EXPECT_NEAR(max_drawdown(std::vector<double>{100, 50, 200, 120}), 0.5, 1e-15);
}

TEST(Drawdown, MatchesBruteForce) {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> len(2, 500);
  for (int i = 0; i < 200; ++i) {
    const auto v = random_curve(gen, len(gen), 0.02);
    EXPECT_NEAR(max_drawdown(v), oracle::brute_max_drawdown(v), 1e-15);
  }
}

TEST(LossDuration, HandCases) {
  auto m = max_loss_duration(std::vector<double>{100, 120, 90, 130});
  EXPECT_EQ(m.days, 2);
  EXPECT_NEAR(m.years, 2.0 / 252, 1e-15);
  EXPECT_FALSE(m.open_drawdown);
  m = max_loss_duration(std::vector<double>{100, 90, 95});
  EXPECT_EQ(m.days, 2);
  EXPECT_TRUE(m.open_drawdown);
  m = max_loss_duration(std::vector<double>{100, 90, 100, 95});
  EXPECT_EQ(m.days, 2);
  EXPECT_FALSE(m.open_drawdown);  // ties go to the closed episode
  EXPECT_EQ(max_loss_duration(std::vector<double>{1, 2, 3}).days, 0);
}

TEST(LossDuration, MatchesBruteForce) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> len(2, 500);
  for (int i = 0; i < 200; ++i) {
    auto v = random_curve(gen, len(gen), 0.02);
    for (auto& x : v) x = std::round(x);  // exact recoveries happen too
    const auto got = max_loss_duration(v);
    const auto want = oracle::brute_loss_duration(v);
    EXPECT_EQ(got.days, want.days);
    EXPECT_EQ(got.open_drawdown, want.open);
  }
}

TEST(InformationRatio, HandCases) {
  // benchmark rows: B&H 24.01% / 12.63%, PUT index 17.93% / 6.52%
  EXPECT_EQ(std::round(information_ratio(0.2401, 0.1263).value * 100) / 100, 1.90);
  EXPECT_EQ(std::round(information_ratio(0.24, 0.1263).value * 100) / 100, 1.90);
  EXPECT_EQ(std::round(information_ratio(0.1793, 0.0652).value * 100) / 100, 2.75);
  EXPECT_EQ(information_ratio(0, 0).value, 0.0);
  const auto inf = information_ratio(0.05, 0);
  EXPECT_TRUE(inf.unbounded);
  EXPECT_TRUE(std::isinf(inf.value));
  EXPECT_LT(information_ratio(-0.05, 0).value, 0);
}

TEST(Tail, HandCases) {
  std::vector<double> r;
  for (int i = 1; i <= 100; ++i) r.push_back(i / 1000.0 - 0.05);  // -0.049 .. 0.05
  const auto t = var_cvar(r);
  EXPECT_NEAR(t.var, 0.045, 1e-15);
  EXPECT_NEAR(t.cvar, 0.047, 1e-15);
  const auto one = var_cvar(std::vector<double>{-0.02});
  EXPECT_EQ(one.var, 0.02);
  EXPECT_EQ(one.cvar, 0.02);
  const auto flat = var_cvar(std::vector<double>(40, 0.001));
  EXPECT_EQ(flat.var, -0.001);
  EXPECT_NEAR(flat.cvar, -0.001, 1e-15);
}

TEST(Tail, MatchesSortOracle) {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<std::size_t> len(1, 600);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> r(len(gen));
    std::student_t_distribution<double> t(3);
    for (auto& x : r) x = 0.01 * t(gen);
    const auto got = var_cvar(r);
    const auto want = oracle::sorted_tail_5pct(r);
    EXPECT_EQ(got.var, want.var);
    EXPECT_NEAR(got.cvar, want.cvar, 1e-15);
    EXPECT_GE(got.cvar, got.var);
  }
}

TEST(Psr, BenchmarkAtSampleSharpeGivesHalf) {
  std::mt19937_64 gen(5);
  const auto r = daily_returns(random_curve(gen, 300));
  const auto sr = sharpe_ratio(r);
  ASSERT_TRUE(sr);
  const auto t = probabilistic_sharpe(r, *sr);
  ASSERT_TRUE(t.defined);
  EXPECT_NEAR(t.probability, 0.5, 1e-9);
}

TEST(Psr, MatchesDirectFormula) {
  std::mt19937_64 gen(6);
  const auto r = daily_returns(random_curve(gen, 500));
  const int n = static_cast<int>(r.size());
  long double mean = 0;
  for (double x : r) mean += x;
  mean /= n;
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double x : r) {
    const long double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double sd = std::sqrt(static_cast<double>(m2 / (n - 1)));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double sr = static_cast<double>(mean) / sd;
  const double skew = static_cast<double>(m3 / std::pow(m2, 1.5L));
  const double kurt = static_cast<double>(m4 / (m2 * m2));
  const double bench = 0.01;
  const double z = (sr - bench) * std::sqrt(n - 1.0) / std::sqrt(1 - skew * sr + (kurt - 1) / 4 * sr * sr);
  EXPECT_NEAR(probabilistic_sharpe(r, bench).probability, putwrite::pricing::normal_cdf(z), 1e-10);
}

TEST(Psr, NormalSampleNearGaussianFormula) {
  // skew ~ 0 and raw kurtosis ~ 3 on a big Gaussian sample
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z(0.0005, 0.01);
  std::vector<double> r(200'000);
  for (auto& x : r) x = z(gen);
  const double sr = *sharpe_ratio(r);
  const double n = static_cast<double>(r.size());
  const double gauss = putwrite::pricing::normal_cdf((sr - 0.045) * std::sqrt(n - 1) / std::sqrt(1 + 0.5 * sr * sr));
  EXPECT_NEAR(probabilistic_sharpe(r, 0.045).probability, gauss, 5e-3);
}

TEST(Psr, UndefinedCases) {
  EXPECT_FALSE(probabilistic_sharpe(std::vector<double>{0.01, 0.02, 0.03}, 0).defined);
  EXPECT_FALSE(probabilistic_sharpe(std::vector<double>(20, 0.01), 0).defined);
  EXPECT_EQ(significance_stars({}), "");
}

TEST(Stars, Thresholds) {
  auto t = SharpeTest{true, 0, 0, 0.89};
  EXPECT_EQ(significance_stars(t), "");
  t.probability = 0.90;
  EXPECT_EQ(significance_stars(t), "*");
  t.probability = 0.95;
  EXPECT_EQ(significance_stars(t), "**");
  t.probability = 0.995;
  EXPECT_EQ(significance_stars(t), "***");
}

TEST(Moments, HandCase) {
  const auto m = moments(std::vector<double>{-1, 1, -1, 1});
  EXPECT_EQ(m.mean, 0.0);
  EXPECT_NEAR(*m.skew, 0.0, 1e-15);
  EXPECT_NEAR(*m.kurtosis, 1.0, 1e-15);
  EXPECT_FALSE(moments(std::vector<double>(5, 0.3)).skew);
}

TEST(Summary, PercentilesInterpolate) {
  const auto s = summary_stats(std::vector<double>{5, 1, 4, 2, 3});
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.max, 5);
  EXPECT_EQ(s.p50, 3);
  EXPECT_NEAR(s.p10, 1.4, 1e-15);
  EXPECT_NEAR(s.p75, 4, 1e-15);
  EXPECT_NEAR(s.variance, 2.5, 1e-15);
}

TEST(Evaluate, PullsPiecesTogether) {
  const std::vector<double> eq{100, 120, 90, 130};
  const auto rep = evaluate(eq, 0);
  EXPECT_EQ(rep.n_returns, 3u);
  EXPECT_NEAR(rep.md, 0.25, 1e-15);
  EXPECT_EQ(rep.mld.days, 2);
  EXPECT_NEAR(rep.arc, std::pow(1.3, 252.0 / 3) - 1, 1e-6 * rep.arc);
}
