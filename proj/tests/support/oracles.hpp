// Independent reference computations used only by tests. Each one follows the
// textbook definition with plain loops and shares no code path with the
// library routine it checks.
#ifndef PANELCUSUM_TESTS_ORACLES_HPP_
#define PANELCUSUM_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows demean(const Rows &x) {
  Rows e = x;
  for (auto &row : e) {
    long double s = 0;
    for (double v : row) s += v;
    const double m = static_cast<double>(s / row.size());
    for (double &v : row) v -= m;
  }
  return e;
}

// U(k) through the two-mean form:
// k(T-k)/T * (mean of first k pooled squares - mean of the remaining ones).
inline std::vector<double> cusum_two_mean(const Rows &x) {
  const Rows e = demean(x);
  const std::size_t len = e.front().size();
  std::vector<double> u;
  for (std::size_t k = 1; k < len; ++k) {
    long double left = 0, right = 0;
    for (const auto &row : e) {
      for (std::size_t t = 0; t < k; ++t) left += row[t] * row[t];
      for (std::size_t t = k; t < len; ++t) right += row[t] * row[t];
    }
    const long double kk = k, tt = len;
    u.push_back(static_cast<double>(kk * (tt - kk) / tt *
                                    (left / kk - right / (tt - kk))));
  }
  return u;
}

// gamma(h) straight from the definition, divisor T.
inline double autocov_sq(const std::vector<double> &e, std::size_t h) {
  const std::size_t len = e.size();
  long double mean = 0;
  for (double v : e) mean += v * v;
  mean /= len;
  long double acc = 0;
  for (std::size_t t = 0; t + h < len; ++t) {
    acc += (e[t] * e[t] - mean) * (e[t + h] * e[t + h] - mean);
  }
  return static_cast<double>(acc / len);
}

inline double sample_variance(const std::vector<double> &v) {
  long double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return static_cast<double>(ss / (v.size() - 1));
}

// T_V from per-panel C_i(k) and a caller-supplied normalizer per panel.
inline double t_v_statistic(const Rows &x, const std::vector<double> &s2) {
  const Rows e = demean(x);
  const std::size_t n = e.size();
  const std::size_t len = e.front().size();
  double best = 0;
  for (std::size_t k = 1; k < len; ++k) {
    long double v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      long double head = 0, all = 0;
      for (std::size_t t = 0; t < len; ++t) {
        all += e[i][t] * e[i][t];
        if (t < k) head += e[i][t] * e[i][t];
      }
      const long double c =
          (head - static_cast<long double>(k) / len * all) / std::sqrt((long double)len);
      v += c / std::sqrt((long double)s2[i]);
    }
    v /= std::sqrt((long double)n);
    best = std::max(best, static_cast<double>(std::fabs(v)));
  }
  return best;
}

// Kolmogorov CDF by brute-force summation of many alternating terms in long
// double, no early stopping.
inline double kolmogorov_cdf(double x) {
  if (x <= 0) return 0;
  long double s = 1;
  for (int k = 1; k <= 2000; ++k) {
    s += 2.0L * ((k % 2) ? -1.0L : 1.0L) * std::exp(-2.0L * k * k * x * x);
  }
  return static_cast<double>(std::clamp<long double>(s, 0, 1));
}

inline Rows random_rows(std::mt19937_64 &rng, std::size_t n, std::size_t len,
                        double scale = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  Rows x(n, std::vector<double>(len));
  for (auto &row : x) {
    for (double &v : row) v = scale * z(rng);
  }
  return x;
}

}  // namespace oracle

#endif  // PANELCUSUM_TESTS_ORACLES_HPP_
