#ifndef PANELCUSUM_DISTRIBUTION_HPP_
#define PANELCUSUM_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "panelcusum/errors.hpp"

namespace panelcusum {

// Law of sup_{0<=x<=1} |B0(x)| for a standard Brownian bridge B0 (the
// Kolmogorov distribution):
//
//   P(sup|B0| <= x) = 1 + 2 sum_{k>=1} (-1)^k exp(-2 k^2 x^2).
//
// The alternating series converges fast for x >= 1. Below that the Jacobi
// theta dual
//
//   P(sup|B0| <= x) = sqrt(2 pi)/x sum_{k odd} exp(-k^2 pi^2 / (8 x^2))
//
// is used instead, which has no cancellation.
class BbSupLaw {
 public:
  struct SeriesSum {
    double value;        // 2 sum (-1)^k exp(-2k^2x^2), k = 1..terms
    double next_term;    // magnitude of the first omitted term
    int terms;
  };

  explicit BbSupLaw(double truncation_tol = 1e-14) : tol_(truncation_tol) {}

  double truncation_tol() const noexcept { return tol_; }

  // Alternating tail sum, stopped once |term| < tol.
  SeriesSum alternating_series(double x) const {
    double sum = 0.0;
    int k = 1;
    for (;; ++k) {
      const double term = 2.0 * std::exp(-2.0 * k * k * x * x);
      if (term < tol_) {
        return {sum, term, k - 1};
      }
      sum += (k % 2 == 1) ? -term : term;
    }
  }

  double cdf(double x) const {
    if (!(x >= kZeroBelow)) {
      return 0.0;
    }
    double p;
    if (x < 1.0) {
      p = theta_dual(x);
    } else {
      p = 1.0 + alternating_series(x).value;
    }
    return std::clamp(p, 0.0, 1.0);
  }

  // P(sup|B0| > x), computed from the tail series directly so that small
  // p-values keep their relative precision.
  double survival(double x) const {
    if (x < 1.0) {
      return 1.0 - cdf(x);
    }
    double sum = 0.0;
    const double lead = 2.0 * std::exp(-2.0 * x * x);
    for (int k = 1;; ++k) {
      const double term = 2.0 * std::exp(-2.0 * k * k * x * x);
      if (k > 1 && term < tol_ * lead) break;
      sum += (k % 2 == 1) ? term : -term;
      if (term == 0.0) break;
    }
    return std::clamp(sum, 0.0, 1.0);
  }

  // Bisection on [1e-6, 10]; cdf(10) is 1 to machine precision.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw OutOfRange("quantile probability must lie in (0, 1), got " +
                       std::to_string(p));
    }
    double lo = 1e-6;
    double hi = 10.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (cdf(mid) < p) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  static constexpr double kZeroBelow = 0.05;

  double theta_dual(double x) const {
    const double pi = std::numbers::pi;
    const double scale = std::sqrt(2.0 * pi) / x;
    double sum = 0.0;
    for (int k = 1;; k += 2) {
      const double term = scale * std::exp(-k * k * pi * pi / (8.0 * x * x));
      sum += term;
      if (term < tol_ * 1e-3) break;
    }
    return sum;
  }

  double tol_;
};

inline double bb_sup_cdf(double x) { return BbSupLaw().cdf(x); }

inline double bb_sup_pvalue(double x) { return BbSupLaw().survival(x); }

inline double bb_sup_quantile(double p) { return BbSupLaw().quantile(p); }

// C_alpha: the upper-alpha critical value.
inline double bb_sup_critical_value(double alpha) {
  return bb_sup_quantile(1.0 - alpha);
}

}  // namespace panelcusum

#endif  // PANELCUSUM_DISTRIBUTION_HPP_
