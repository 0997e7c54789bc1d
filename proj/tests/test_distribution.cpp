#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "panelcusum/distribution.hpp"
#include "support/oracles.hpp"

namespace panelcusum {
namespace {

TEST(BbSupCdf, ZeroAndNegative) {
  EXPECT_EQ(bb_sup_cdf(0.0), 0.0);
  EXPECT_EQ(bb_sup_cdf(-1.0), 0.0);
  EXPECT_EQ(bb_sup_cdf(0.04), 0.0);
}

TEST(BbSupCdf, CriticalValues) {
  EXPECT_NEAR(bb_sup_cdf(1.224), 0.900, 5e-4);
  EXPECT_NEAR(bb_sup_cdf(1.358), 0.950, 5e-4);
  EXPECT_NEAR(bb_sup_cdf(1.628), 0.990, 5e-4);
}

TEST(BbSupCdf, TendsToOne) {
  EXPECT_EQ(bb_sup_cdf(10.0), 1.0);
  EXPECT_GT(bb_sup_cdf(3.0), 1.0 - 1e-7);
}

TEST(BbSupCdf, MonotoneOnGrid) {
  double previous = 0.0;
  for (int j = 0; j <= 500; ++j) {
    const double p = bb_sup_cdf(0.01 * j);
    EXPECT_GE(p, previous) << "x = " << 0.01 * j;
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    previous = p;
  }
}

TEST(BbSupCdf, AgreesWithLongSeriesOracle) {
  // The oracle's brute-force sum is only accurate away from 0.
  for (int j = 30; j <= 400; ++j) {
    const double x = 0.01 * j;
    EXPECT_NEAR(bb_sup_cdf(x), oracle::kolmogorov_cdf(x), 1e-12) << x;
  }
}

TEST(BbSupCdf, ThetaDualMatchesSeriesOnOverlap) {
  // Around x = 1 the two representations must coincide.
  const BbSupLaw law;
  for (double x : {0.6, 0.8, 0.95, 0.999}) {
    EXPECT_NEAR(law.cdf(x), 1.0 + law.alternating_series(x).value, 1e-13);
  }
}

TEST(BbSupLaw, TruncationErrorBound) {
  const BbSupLaw law;
  for (int j = 20; j <= 500; ++j) {
    const double x = 0.01 * j;
    const auto s = law.alternating_series(x);
    EXPECT_LE(s.next_term, law.truncation_tol());
    const double exact = oracle::kolmogorov_cdf(x) - 1.0;
    EXPECT_LE(std::abs(s.value - exact), s.next_term + 1e-15) << x;
  }
}

TEST(BbSupLaw, SurvivalKeepsRelativePrecision) {
  const double x = 4.0;
  const double expected = 2.0 * std::exp(-32.0) - 2.0 * std::exp(-128.0);
  EXPECT_NEAR(bb_sup_pvalue(x) / expected, 1.0, 1e-12);
  EXPECT_NEAR(bb_sup_pvalue(6.0) / (2.0 * std::exp(-72.0)), 1.0, 1e-12);
  for (double y : {0.3, 1.0, 1.358, 2.0}) {
    EXPECT_NEAR(bb_sup_pvalue(y), 1.0 - bb_sup_cdf(y), 1e-13);
  }
}

TEST(BbSupQuantile, CriticalValues) {
  EXPECT_NEAR(bb_sup_quantile(0.90), 1.224, 1e-3);
  EXPECT_NEAR(bb_sup_quantile(0.95), 1.358, 1e-3);
  EXPECT_NEAR(bb_sup_quantile(0.99), 1.628, 1e-3);
  EXPECT_NEAR(bb_sup_critical_value(0.05), 1.358, 1e-3);
}

TEST(BbSupQuantile, RoundTrip) {
  for (double p : {0.1, 0.5, 0.99, 0.001, 0.9999}) {
    EXPECT_NEAR(bb_sup_cdf(bb_sup_quantile(p)), p, 1e-8) << p;
  }
}

TEST(BbSupQuantile, OutOfRange) {
  EXPECT_THROW(bb_sup_quantile(0.0), OutOfRange);
  EXPECT_THROW(bb_sup_quantile(1.0), OutOfRange);
  EXPECT_THROW(bb_sup_quantile(-0.2), OutOfRange);
  EXPECT_THROW(bb_sup_quantile(std::nan("")), OutOfRange);
}

// Discretized bridges: B0(j/n) = W(j/n) - (j/n) W(1) with W a scaled random
// walk. Sampling sup|B0| only at grid points biases it low by about
// 0.5826/sqrt(n) (the discrete-monitoring correction for Brownian extrema),
// which at n = 2000 is larger than the 0.01 tolerance, so the sampled maxima
// are shifted by that amount before comparison.
TEST(BbSupCdf, MatchesSimulatedBridges) {
  constexpr int kBridges = 100000;
  constexpr int kGrid = 2000;
  const double shift = 0.5826 / std::sqrt(static_cast<double>(kGrid));
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> walk(kGrid + 1);
  std::vector<double> sups(kBridges);
  const double step = 1.0 / std::sqrt(static_cast<double>(kGrid));
  for (int b = 0; b < kBridges; ++b) {
    walk[0] = 0.0;
    for (int j = 1; j <= kGrid; ++j) walk[j] = walk[j - 1] + step * z(rng);
    double sup = 0.0;
    for (int j = 1; j < kGrid; ++j) {
      const double bridge =
          walk[j] - static_cast<double>(j) / kGrid * walk[kGrid];
      sup = std::max(sup, std::abs(bridge));
    }
    sups[b] = sup + shift;
  }
  std::sort(sups.begin(), sups.end());
  double gap = 0.0;
  for (int b = 0; b < kBridges; ++b) {
    const double f = bb_sup_cdf(sups[b]);
    gap = std::max({gap, std::abs(f - static_cast<double>(b) / kBridges),
                    std::abs(f - static_cast<double>(b + 1) / kBridges)});
  }
  EXPECT_LE(gap, 0.01);
}

}  // namespace
}  // namespace panelcusum
