#ifndef PANELCUSUM_CORE_HPP_
#define PANELCUSUM_CORE_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "panelcusum/errors.hpp"

namespace panelcusum {

using Index = Eigen::Index;
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// A balanced panel: rows are panel units, columns are time points. Instances
// only come out of validate_panel, so every PanelData holds N >= 1, T >= 3
// and finite entries.
class PanelData {
 public:
  Index units() const noexcept { return values_.rows(); }
  Index periods() const noexcept { return values_.cols(); }
  const Matrix &values() const noexcept { return values_; }
  const std::vector<std::string> &unit_ids() const noexcept {
    return unit_ids_;
  }
  const std::vector<std::string> &time_ids() const noexcept {
    return time_ids_;
  }

  // Columns [start, start + length). The slice inherits the matching labels.
  PanelData columns(Index start, Index length) const;

 private:
  PanelData(Matrix values, std::vector<std::string> unit_ids,
            std::vector<std::string> time_ids)
      : values_(std::move(values)), unit_ids_(std::move(unit_ids)),
        time_ids_(std::move(time_ids)) {}

  friend PanelData validate_panel(Matrix raw,
                                  std::vector<std::string> unit_ids,
                                  std::vector<std::string> time_ids);

  Matrix values_;
  std::vector<std::string> unit_ids_;
  std::vector<std::string> time_ids_;
};

struct ResidualPanel {
  Matrix residuals;  // e_hat[i][t] = X[i][t] - mean_i
  Vector row_means;
};

// Label vectors may be empty; when present they must match the dimensions.
inline PanelData validate_panel(Matrix raw,
                                std::vector<std::string> unit_ids = {},
                                std::vector<std::string> time_ids = {}) {
  if (raw.rows() == 0) {
    throw EmptyPanel();
  }
  if (raw.cols() < 3) {
    throw TooFewColumns(static_cast<std::size_t>(raw.cols()));
  }
  for (Index i = 0; i < raw.rows(); ++i) {
    for (Index t = 0; t < raw.cols(); ++t) {
      if (!std::isfinite(raw(i, t))) {
        throw NonFinite(static_cast<std::size_t>(i),
                        static_cast<std::size_t>(t));
      }
    }
  }
  if (!unit_ids.empty() && static_cast<Index>(unit_ids.size()) != raw.rows()) {
    throw InvalidSpec("unit label count does not match panel rows");
  }
  if (!time_ids.empty() && static_cast<Index>(time_ids.size()) != raw.cols()) {
    throw InvalidSpec("time label count does not match panel columns");
  }
  return PanelData(std::move(raw), std::move(unit_ids), std::move(time_ids));
}

inline PanelData PanelData::columns(Index start, Index length) const {
  if (start < 0 || length < 0 || start + length > periods()) {
    throw OutOfRange("column slice outside the panel");
  }
  std::vector<std::string> times;
  if (!time_ids_.empty()) {
    times.assign(time_ids_.begin() + start,
                 time_ids_.begin() + start + length);
  }
  return validate_panel(values_.middleCols(start, length), unit_ids_,
                        std::move(times));
}

inline ResidualPanel demean_rows(const PanelData &panel) {
  const Matrix &x = panel.values();
  const Index n = x.rows();
  const Index len = x.cols();
  ResidualPanel out{Matrix(n, len), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const auto row = x.row(i);
    // A constant row demeans to exact zeros; summation rounding would
    // otherwise leave ulp-sized residuals behind.
    const bool constant = (row.array() == row(0)).all();
    const double mean = constant ? row(0) : row.sum() / static_cast<double>(len);
    out.row_means(i) = mean;
    if (constant) {
      out.residuals.row(i).setZero();
    } else {
      out.residuals.row(i) = row.array() - mean;
    }
  }
  return out;
}

// Log differences of an N x (T+1) price matrix, without the panel shape
// checks (T may be below 3 here).
inline Matrix log_return_matrix(const Matrix &prices) {
  if (prices.rows() == 0) {
    throw EmptyPanel();
  }
  if (prices.cols() < 2) {
    throw TooFewColumns(0);
  }
  for (Index i = 0; i < prices.rows(); ++i) {
    for (Index t = 0; t < prices.cols(); ++t) {
      const double p = prices(i, t);
      if (!std::isfinite(p)) {
        throw NonFinite(static_cast<std::size_t>(i),
                        static_cast<std::size_t>(t));
      }
      if (!(p > 0.0)) {
        throw NonPositivePrice(static_cast<std::size_t>(i),
                               static_cast<std::size_t>(t));
      }
    }
  }
  const Index len = prices.cols() - 1;
  Matrix returns(prices.rows(), len);
  for (Index i = 0; i < prices.rows(); ++i) {
    for (Index t = 0; t < len; ++t) {
      returns(i, t) = std::log(prices(i, t + 1)) - std::log(prices(i, t));
    }
  }
  return returns;
}

// r[i][t] = log P[i][t+1] - log P[i][t] as a panel. The label of the first
// price column is dropped.
inline PanelData log_returns(const Matrix &prices,
                             std::vector<std::string> unit_ids = {},
                             std::vector<std::string> time_ids = {}) {
  Matrix returns = log_return_matrix(prices);
  if (!time_ids.empty()) {
    time_ids.erase(time_ids.begin());
  }
  return validate_panel(std::move(returns), std::move(unit_ids),
                        std::move(time_ids));
}

}  // namespace panelcusum

#endif  // PANELCUSUM_CORE_HPP_
