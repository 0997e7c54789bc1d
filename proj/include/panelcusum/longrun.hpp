#ifndef PANELCUSUM_LONGRUN_HPP_
#define PANELCUSUM_LONGRUN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "panelcusum/core.hpp"

namespace panelcusum {

// Truncation lag h_T for the autocovariance sum.
struct BandwidthRule {
  enum class Kind { FourthRoot, ThirdRoot, Fixed };

  Kind kind = Kind::FourthRoot;
  Index lag = 0;  // only read for Kind::Fixed

  static BandwidthRule fourth_root() { return {Kind::FourthRoot, 0}; }
  static BandwidthRule third_root() { return {Kind::ThirdRoot, 0}; }
  static BandwidthRule fixed(Index h) { return {Kind::Fixed, h}; }

  friend bool operator==(const BandwidthRule &, const BandwidthRule &) = default;
};

struct ResolvedBandwidth {
  Index lag;
  bool clamped;  // the rule's raw value fell outside [1, T-2]
};

namespace detail {

// floor(n^(1/root)) without trusting pow() near perfect powers.
inline Index integer_root_floor(Index n, int root) {
  auto power = [root](Index b) {
    Index r = 1;
    for (int i = 0; i < root; ++i) r *= b;
    return r;
  };
  Index b = static_cast<Index>(
      std::floor(std::pow(static_cast<double>(n), 1.0 / root)));
  while (b > 0 && power(b) > n) --b;
  while (power(b + 1) <= n) ++b;
  return b;
}

}  // namespace detail

inline ResolvedBandwidth resolve_bandwidth(Index periods, BandwidthRule rule) {
  Index raw = 0;
  switch (rule.kind) {
    case BandwidthRule::Kind::FourthRoot:
      raw = detail::integer_root_floor(periods, 4);
      break;
    case BandwidthRule::Kind::ThirdRoot:
      raw = detail::integer_root_floor(periods, 3);
      break;
    case BandwidthRule::Kind::Fixed:
      raw = rule.lag;
      break;
  }
  const Index hi = std::max<Index>(1, periods - 2);
  const Index lag = std::clamp<Index>(raw, 1, hi);
  return {lag, lag != raw};
}

struct LrvEstimate {
  double value = 0.0;
  Index bandwidth_used = 0;
  bool floored = false;
  double gamma0 = 0.0;
};

namespace detail {

inline std::vector<double> centered_squares(std::span<const double> row) {
  std::vector<double> sq(row.size());
  double mean = 0.0;
  for (std::size_t t = 0; t < row.size(); ++t) {
    sq[t] = row[t] * row[t];
    mean += sq[t];
  }
  mean /= static_cast<double>(row.size());
  for (double &v : sq) v -= mean;
  return sq;
}

inline double mean_square(std::span<const double> row) {
  double s = 0.0;
  for (double v : row) s += v * v;
  return s / static_cast<double>(row.size());
}

// gamma(h) of an already centered sequence, divisor = full length.
inline double lagged_product(const std::vector<double> &c, std::size_t h) {
  double acc = 0.0;
  for (std::size_t t = 0; t + h < c.size(); ++t) acc += c[t] * c[t + h];
  return acc / static_cast<double>(c.size());
}

// ê² counts as constant when its spread is negligible against its level.
inline bool is_degenerate(double spread, double level) {
  return !(spread > 1e-24 * level * level);
}

}  // namespace detail

// Autocovariance at lag h of the squared residuals, normalized by T.
inline double autocov_sq(std::span<const double> residual_row, Index h) {
  if (h < 0 || static_cast<std::size_t>(h) >= residual_row.size()) {
    throw LagTooLarge(static_cast<std::size_t>(std::max<Index>(h, 0)),
                      residual_row.size());
  }
  return detail::lagged_product(detail::centered_squares(residual_row),
                                static_cast<std::size_t>(h));
}

// gamma(0) + 2 * sum_{h=1..h_T} gamma(h), floored at
// max(1e-3 * gamma(0), 1e-12) so the result is always strictly positive.
inline LrvEstimate lrv_estimate(std::span<const double> residual_row,
                                BandwidthRule rule = {}) {
  const auto len = static_cast<Index>(residual_row.size());
  if (len < 3) {
    throw TooFewColumns(residual_row.size());
  }
  const ResolvedBandwidth bw = resolve_bandwidth(len, rule);
  const std::vector<double> c = detail::centered_squares(residual_row);
  LrvEstimate est;
  est.bandwidth_used = bw.lag;
  est.gamma0 = detail::lagged_product(c, 0);
  if (detail::is_degenerate(est.gamma0, detail::mean_square(residual_row))) {
    throw DegenerateSeries();
  }
  double sum = est.gamma0;
  for (Index h = 1; h <= bw.lag; ++h) {
    sum += 2.0 * detail::lagged_product(c, static_cast<std::size_t>(h));
  }
  const double floor = std::max(1e-3 * est.gamma0, 1e-12);
  est.floored = sum < floor;
  est.value = est.floored ? floor : sum;
  return est;
}

// Unbiased (divisor T-1) sample variance of the squared residuals.
inline double simple_variance_sq(std::span<const double> residual_row) {
  if (residual_row.size() < 2) {
    throw TooFewColumns(residual_row.size());
  }
  const std::vector<double> c = detail::centered_squares(residual_row);
  double ss = 0.0;
  for (double v : c) ss += v * v;
  if (detail::is_degenerate(ss / static_cast<double>(c.size()),
                            detail::mean_square(residual_row))) {
    throw DegenerateSeries();
  }
  return ss / static_cast<double>(c.size() - 1);
}

}  // namespace panelcusum

#endif  // PANELCUSUM_LONGRUN_HPP_
