#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "panelcusum/core.hpp"
#include "support/helpers.hpp"

namespace panelcusum {
namespace {

using testing_support::panel_of;

TEST(ValidatePanel, AcceptsFiniteMatrix) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const PanelData p = validate_panel(m);
  EXPECT_EQ(p.units(), 2);
  EXPECT_EQ(p.periods(), 3);
}

TEST(ValidatePanel, RejectsNaNWithPosition) {
  Matrix m = Matrix::Ones(2, 4);
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_panel(m);
    FAIL() << "expected NonFinite";
  } catch (const NonFinite &e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.col(), 2u);
  }
}

TEST(ValidatePanel, RejectsInfinity) {
  Matrix m = Matrix::Ones(1, 3);
  m(0, 0) = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_panel(m), NonFinite);
}

TEST(ValidatePanel, RejectsTooFewColumns) {
  try {
    validate_panel(Matrix::Ones(3, 2));
    FAIL() << "expected TooFewColumns";
  } catch (const TooFewColumns &e) {
    EXPECT_EQ(e.columns(), 2u);
  }
}

TEST(ValidatePanel, RejectsEmptyPanel) {
  EXPECT_THROW(validate_panel(Matrix(0, 5)), EmptyPanel);
}

TEST(ValidatePanel, RejectsMismatchedLabels) {
  EXPECT_THROW(validate_panel(Matrix::Ones(2, 3), {"a"}), InvalidSpec);
  EXPECT_THROW(validate_panel(Matrix::Ones(2, 3), {}, {"t1", "t2"}),
               InvalidSpec);
}

TEST(PanelColumns, SlicesValuesAndLabels) {
  Matrix m(1, 5);
  m << 0, 1, 2, 3, 4;
  const PanelData p = validate_panel(m, {"u"}, {"a", "b", "c", "d", "e"});
  const PanelData s = p.columns(1, 3);
  EXPECT_EQ(s.periods(), 3);
  EXPECT_DOUBLE_EQ(s.values()(0, 0), 1.0);
  EXPECT_EQ(s.time_ids(), (std::vector<std::string>{"b", "c", "d"}));
  EXPECT_EQ(s.unit_ids(), (std::vector<std::string>{"u"}));
  EXPECT_THROW(p.columns(3, 3), OutOfRange);
}

TEST(DemeanRows, HandArithmetic) {
  const ResidualPanel r = demean_rows(panel_of({{0, 2, 0, 4}}));
  EXPECT_DOUBLE_EQ(r.row_means(0), 1.5);
  EXPECT_DOUBLE_EQ(r.residuals(0, 0), -1.5);
  EXPECT_DOUBLE_EQ(r.residuals(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(r.residuals(0, 2), -1.5);
  EXPECT_DOUBLE_EQ(r.residuals(0, 3), 2.5);
}

TEST(DemeanRows, ConstantRowGivesExactZeros) {
  const ResidualPanel r = demean_rows(panel_of({{0.1, 0.1, 0.1}}));
  EXPECT_EQ(r.residuals(0, 0), 0.0);
  EXPECT_EQ(r.residuals(0, 1), 0.0);
  EXPECT_EQ(r.residuals(0, 2), 0.0);
}

TEST(DemeanRows, ZeroMeanRowIsFixedPoint) {
  const ResidualPanel r = demean_rows(panel_of({{-1, 1, 0}, {3, 4, 5}}));
  EXPECT_EQ(r.residuals(0, 0), -1.0);
  EXPECT_EQ(r.residuals(0, 1), 1.0);
  EXPECT_EQ(r.residuals(0, 2), 0.0);
}

TEST(DemeanRows, IdempotentAndRowsSumToZero) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> dim(3, 60);
    auto rows = oracle::random_rows(rng, dim(rng) / 4 + 1, dim(rng), 3.0);
    for (auto &row : rows) {
      for (double &v : row) v += 100.0;
    }
    const PanelData p = panel_of(rows);
    const ResidualPanel once = demean_rows(p);
    const ResidualPanel twice = demean_rows(validate_panel(once.residuals));
    const double xmax = p.values().cwiseAbs().maxCoeff();
    for (Index i = 0; i < p.units(); ++i) {
      EXPECT_NEAR(once.residuals.row(i).sum(), 0.0,
                  1e-9 * static_cast<double>(p.periods()) * xmax);
      for (Index t = 0; t < p.periods(); ++t) {
        EXPECT_NEAR(twice.residuals(i, t), once.residuals(i, t),
                    1e-12 * std::max(1.0, std::abs(once.residuals(i, t))) +
                        1e-12 * xmax);
      }
    }
  }
}

TEST(LogReturns, HandValues) {
  const double e = std::numbers::e;
  Matrix prices(1, 3);
  prices << 1, e, e;
  const Matrix r = log_return_matrix(prices);
  ASSERT_EQ(r.cols(), 2);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-15);

  const Matrix z = log_return_matrix(Matrix::Constant(1, 4, 2.0));
  EXPECT_EQ(z(0, 0), 0.0);
  EXPECT_EQ(z(0, 1), 0.0);
  EXPECT_EQ(z(0, 2), 0.0);

  Matrix up_down(1, 3);
  up_down << 1, 2, 1;
  const Matrix u = log_return_matrix(up_down);
  EXPECT_NEAR(u(0, 0), 0.693147, 1e-6);
  EXPECT_NEAR(u(0, 1), -0.693147, 1e-6);
}

TEST(LogReturns, PanelNeedsThreeReturns) {
  const double e = std::numbers::e;
  Matrix short_path(1, 3);
  short_path << 1, e, e;
  EXPECT_THROW(log_returns(short_path), TooFewColumns);

  Matrix prices(1, 4);
  prices << 1, e, e, 1;
  const PanelData r = log_returns(prices);
  EXPECT_EQ(r.periods(), 3);
  EXPECT_NEAR(r.values()(0, 2), -1.0, 1e-15);
}

TEST(LogReturns, RejectsNonPositivePrice) {
  Matrix prices = Matrix::Ones(2, 5);
  prices(1, 3) = 0.0;
  try {
    log_returns(prices);
    FAIL() << "expected NonPositivePrice";
  } catch (const NonPositivePrice &e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.col(), 3u);
  }
}

TEST(LogReturns, DropsFirstTimeLabel) {
  Matrix prices = Matrix::Constant(1, 4, 3.0);
  const PanelData r =
      log_returns(prices, {"x"}, {"d0", "d1", "d2", "d3"});
  EXPECT_EQ(r.time_ids(), (std::vector<std::string>{"d1", "d2", "d3"}));
}

TEST(LogReturns, InvariantToPriceRescaling) {
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> price(3.0, 0.5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p(3, 20);
    for (Index i = 0; i < p.rows(); ++i) {
      for (Index t = 0; t < p.cols(); ++t) p(i, t) = price(rng);
    }
    const double c = scale(rng);
    const Matrix a = log_return_matrix(p);
    const Matrix b = log_return_matrix(p * c);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
}  // namespace panelcusum
