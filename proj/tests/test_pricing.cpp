#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "putwrite/pricing.hpp"
#include "support/oracles.hpp"

using namespace putwrite::pricing;

TEST(Bsm, ExpiryAndZeroVolBranches) {
  EXPECT_EQ(bsm_put_price({100, 90, 0.05, 0, 0.2, 0}), 0.0);
  EXPECT_EQ(bsm_put_price({100, 110, 0.05, 0, 0.2, 0}), 10.0);
  EXPECT_EQ(bsm_put_price({100, 100, 0, 0, 0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(bsm_put_price({100, 110, 0.05, 0.01, 0, 1}),
                   std::max(110 * std::exp(-0.05) - 100 * std::exp(-0.01), 0.0));
}

TEST(Bsm, MatchesQuadratureAtReferencePoint) {
  EXPECT_NEAR(bsm_put_price({100, 100, 0.05, 0, 0.2, 1}), oracle::quadrature_put(100, 100, 0.05, 0, 0.2, 1), 1e-6);
}

TEST(Bsm, MatchesQuadratureOnRandomInputs) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double S = 50 + 100 * U(gen), K = S * (0.7 + 0.6 * U(gen));
    const double r = 0.1 * U(gen), q = 0.05 * U(gen), sigma = 0.05 + 0.6 * U(gen), tau = 0.002 + 2 * U(gen);
    EXPECT_NEAR(bsm_put_price({S, K, r, q, sigma, tau}), oracle::quadrature_put(S, K, r, q, sigma, tau), 1e-6)
        << S << " " << K << " " << r << " " << q << " " << sigma << " " << tau;
  }
}

TEST(Bsm, PutCallParity) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 200; ++i) {
    PricingInputs in{100, 60 + 80 * U(gen), 0.08 * U(gen), 0.04 * U(gen), 0.05 + 0.5 * U(gen), 0.01 + U(gen)};
    const double lhs = bsm_call_price(in) - bsm_put_price(in);
    const double rhs = in.spot * std::exp(-in.dividend * in.tau) - in.strike * std::exp(-in.rate * in.tau);
    EXPECT_NEAR(lhs, rhs, 1e-10 * in.spot);
  }
}

TEST(Bsm, MonotoneInStrikeAndVol) {
  double prev = -1;
  for (double K = 80; K <= 120; K += 0.5) {
    const double v = bsm_put_price({100, K, 0.02, 0, 0.2, 0.5});
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = -1;
  for (double s = 0.05; s <= 1.0; s += 0.05) {
    const double v = bsm_put_price({100, 100, 0.02, 0, s, 0.5});
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Bsm, RejectsInvalidInputs) {
  EXPECT_THROW(bsm_put_price({0, 100, 0, 0, 0.2, 1}), std::invalid_argument);
  EXPECT_THROW(bsm_put_price({100, -1, 0, 0, 0.2, 1}), std::invalid_argument);
  EXPECT_THROW(bsm_put_price({100, 100, 0, 0, -0.1, 1}), std::invalid_argument);
  EXPECT_THROW(bsm_put_price({100, 100, 0, 0, 0.2, -1}), std::invalid_argument);
}

TEST(Moneyness, HandCases) {
  EXPECT_EQ(put_moneyness(100, 100, 0, 0.3), 0.0);
  EXPECT_EQ(put_moneyness(100, 98, 0, 0), -2.0);
  EXPECT_NEAR(put_moneyness(100, 100, 0.05, 1), 100 * std::exp(-0.05) - 100, 1e-12);
  EXPECT_NEAR(put_moneyness(100, 100, 0.05, 1), -4.877, 1e-3);
}

TEST(SelectStrike, HandCases) {
  std::vector<double> strikes;
  for (double k = 3800; k <= 4100; k += 25) strikes.push_back(k);
  EXPECT_EQ(select_strike(strikes, 4000, 0, 0.01, 2), 3925);
  EXPECT_EQ(select_strike(strikes, 4000, 0, 0.01, 0), 4000);
  // target 2012.5 sits halfway between 2000 and 2025
  EXPECT_EQ(select_strike(std::vector<double>{1975, 2000, 2025, 2050}, 4025, 0, 0.01, 50), 2000);
}

TEST(SelectStrike, IgnoresOffGridStrikesAndFailsWithoutGrid) {
  std::vector<double> strikes{3910, 3920, 3950};
  EXPECT_EQ(select_strike(strikes, 4000, 0, 0.01, 2), 3950);
  EXPECT_THROW(select_strike(std::vector<double>{3910, 3920}, 4000, 0, 0.01, 2), std::invalid_argument);
}

TEST(SelectStrike, MinimizesDistanceByScan) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> strikes;
  for (double k = 2000; k <= 6000; k += 25) strikes.push_back(k);
  for (int i = 0; i < 300; ++i) {
    const double S = 3000 + 2000 * U(gen), r = 0.06 * U(gen), tau = 5 * U(gen) / 252, pct = 10 * U(gen);
    const double K = select_strike(strikes, S, r, tau, pct);
    const double target = -pct / 100 * S;
    const double d = std::abs(put_moneyness(S, K, r, tau) - target);
    for (double k : strikes) EXPECT_LE(d, std::abs(put_moneyness(S, k, r, tau) - target));
  }
}

TEST(Margin, HandCases) {
  EXPECT_DOUBLE_EQ(put_margin(1, 100, 90), 1600);
  EXPECT_DOUBLE_EQ(put_margin(21, 100, 120), 3100);
  EXPECT_DOUBLE_EQ(put_margin(0, 100, 100), 1500);
}

TEST(Margin, ContinuousInSpot) {
  // Lipschitz bound: |dM/dS| <= 115 per unit of S, so on a 1e-3 grid jumps stay below 0.12
  double prev = put_margin(5, 50, 100);
  for (double S = 50.001; S <= 200; S += 0.001) {
    const double m = put_margin(5, S, 100);
    EXPECT_LE(std::abs(m - prev), 0.116) << S;
    prev = m;
  }
}
