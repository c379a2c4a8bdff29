#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "putwrite/kelly.hpp"
#include "putwrite/pricing.hpp"
#include "support/oracles.hpp"

using namespace putwrite::kelly;

TEST(Simulate, ZeroVolIsDeterministicForward) {
  SimConfig c{100, 0.0, 0.03, 0.01, 0.5, 7, 50, 1, std::nullopt};
  for (double s : simulate_terminal_prices(c)) EXPECT_NEAR(s, 100 * std::exp(0.02 * 0.5), 1e-12);
}

TEST(Simulate, MeanWithinThreeStandardErrors) {
  SimConfig c{100, 0.2, 0.03, 0.01, 1.0, 1, 100'000, 42, std::nullopt};
  const auto s = simulate_terminal_prices(c);
  double mean = 0, sq = 0;
  for (double v : s) mean += v;
  mean /= s.size();
  for (double v : s) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (s.size() - 1) / s.size());
  EXPECT_LT(std::abs(mean - 100 * std::exp(0.02)), 3 * se);
}

TEST(Simulate, SeededAndOrderIndependent) {
  SimConfig c{100, 0.3, 0.0, 0.0, 0.1, 5, 1000, 9, std::nullopt};
  EXPECT_EQ(simulate_terminal_prices(c), simulate_terminal_prices(c));
  auto more = c;
  more.n_paths = 2000;
  const auto a = simulate_terminal_prices(c);
  const auto b = simulate_terminal_prices(more);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  auto other = c;
  other.seed = 10;
  EXPECT_NE(simulate_terminal_prices(other), a);
}

TEST(Simulate, DriftOverride) {
  SimConfig c{100, 0.0, 0.05, 0.0, 1.0, 1, 3, 1, 0.0};
  for (double s : simulate_terminal_prices(c)) EXPECT_NEAR(s, 100.0, 1e-12);
}

TEST(Pab, StaysOtmWins) {
  SimConfig c{4000, 0.0, 0.0, 0.0, 1.0 / 252, 1, 100, 3, std::nullopt};
  const auto in = estimate_pab(2.0, 3900, c, 0.0);
  EXPECT_EQ(in.p, 1.0);
  ASSERT_TRUE(in.b);
  EXPECT_EQ(*in.b, 1.0);
  EXPECT_FALSE(in.a);
}

TEST(Pab, ItmLosesWholePremium) {
  // V_T = 100 - 96 = 4 = 2P
  SimConfig c{96, 0.0, 0.0, 0.0, 1.0 / 252, 1, 10, 3, std::nullopt};
  const auto in = estimate_pab(2.0, 100, c, 0.0);
  EXPECT_EQ(in.p, 0.0);
  ASSERT_TRUE(in.a);
  EXPECT_EQ(*in.a, 1.0);
  EXPECT_FALSE(in.b);
}

TEST(Pab, MatchesLoopOracle) {
  SimConfig c{4000, 0.25, 0.02, 0.0, 2.0 / 252, 2, 5000, 11, std::nullopt};
  const auto s = simulate_terminal_prices(c);
  const auto r = short_put_returns(8.0, 3950, s, c, 1.0 / 252);
  const auto in = summarize_returns(r);
  int win = 0;
  double sw = 0, sl = 0;
  for (double x : s) {
    const double v = putwrite::pricing::bsm_put_price({x, 3950, 0.02, 0.0, 0.25, 1.0 / 252});
    const double ri = (8.0 - v) / 8.0;
    if (ri > 0) {
      ++win;
      sw += ri;
    } else {
      sl += ri;
    }
  }
  EXPECT_DOUBLE_EQ(in.p, win / 5000.0);
  EXPECT_NEAR(*in.b, sw / win, 1e-12);
  EXPECT_NEAR(*in.a, -sl / (5000 - win), 1e-12);
}

TEST(Growth, HandCases) {
  EXPECT_EQ(kelly_growth(0, 0.3, 2), 0.0);
  EXPECT_NEAR(kelly_growth(0.5, 0.5, 1), 0.5 * std::log(1.5) + 0.5 * std::log(0.5), 1e-15);
  EXPECT_NEAR(kelly_growth(0.5, 0.5, 1), -0.1438, 1e-4);
  EXPECT_THROW(kelly_growth(1.0, 0.5, 1), std::domain_error);
  EXPECT_THROW(kelly_growth(0.5, 0.5, 0), std::domain_error);
}

TEST(Binary, HandCases) {
  EXPECT_EQ(kelly_fraction_binary(0.5, 1), 0.0);
  EXPECT_NEAR(kelly_fraction_binary(0.6, 1), 0.2, 1e-15);
  EXPECT_EQ(kelly_fraction_binary(1.0, 0.3), 1.0);
  EXPECT_EQ(kelly_fraction_binary(1.0, 7.0), 1.0);
  EXPECT_NEAR(oracle::grid_kelly(0.6, 1), 0.2, 2e-4);
}

TEST(Binary, IsArgmaxOfGrowth) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> P(0.05, 0.95), B(0.1, 5);
  int n = 0;
  while (n < 100) {
    const double p = P(gen), b = B(gen);
    if (b * p <= 1 - p) continue;
    ++n;
    EXPECT_LE(std::abs(kelly_fraction_binary(p, b) - oracle::grid_kelly(p, b)), 2e-4) << p << " " << b;
  }
}

TEST(Partial, HandCases) {
  auto f = kelly_fraction_partial({0.6, 0.3, 0.5, 6, 4, 0});
  EXPECT_NEAR(f.raw_f, 0.6 / 0.5 - 0.4 / 0.3, 1e-15);
  EXPECT_EQ(f.clamped_f, 0.0);
  f = kelly_fraction_partial({1.0, 1.0, std::nullopt, 10, 0, 1});
  EXPECT_EQ(f.clamped_f, 1.0);
  f = kelly_fraction_partial({1.0, 1.0, std::nullopt, 10, 0, 1}, 0.4);
  EXPECT_EQ(f.clamped_f, 0.4);
  f = kelly_fraction_partial({0.9, 0.5, 1.0, 9, 1, 0});
  EXPECT_NEAR(f.raw_f, 0.7, 1e-15);
  EXPECT_NEAR(f.clamped_f, 0.7, 1e-15);
  f = kelly_fraction_partial({0.0, std::nullopt, 1.0, 0, 10, -1});
  EXPECT_EQ(f.clamped_f, 0.0);
}

TEST(Partial, AlwaysInsideBounds) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double fmax = 0.1 + 0.9 * U(gen);
    const auto f = kelly_fraction_partial({U(gen), 5 * U(gen) + 1e-6, 5 * U(gen) + 1e-6, 1, 1, 0}, fmax);
    EXPECT_GE(f.clamped_f, 0.0);
    EXPECT_LE(f.clamped_f, fmax);
  }
}

TEST(Contracts, HandCases) {
  EXPECT_EQ(kelly_contracts(5'000'000, 61'000, {0.5, 0.5, 1}), 40);
  EXPECT_EQ(kelly_contracts(5'000'000, 61'000, {0, 0, 1}), 0);
  EXPECT_EQ(kelly_contracts(50'000, 61'000, {1, 1, 1}), 0);
  EXPECT_THROW(kelly_contracts(1, 0, {1, 1, 1}), std::invalid_argument);
}
