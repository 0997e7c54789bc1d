#ifndef PANELCUSUM_CUSUM_HPP_
#define PANELCUSUM_CUSUM_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "panelcusum/core.hpp"
#include "panelcusum/distribution.hpp"
#include "panelcusum/longrun.hpp"
#include "panelcusum/parallel.hpp"

namespace panelcusum {

// Aggregated CUSUM of squared residuals. values[k-1] holds U(k) for
// k = 1..T-1, prefix_sums[k-1] holds S_k = sum_{t<=k} sum_i e_hat^2.
struct CusumProcess {
  Vector values;
  Vector prefix_sums;

  Index periods() const noexcept { return prefix_sums.size(); }
  double at(Index k) const { return values(k - 1); }
};

enum class TestKind { TU, TV };

// How the per-panel normalizer s_hat^2*_i is estimated.
enum class Normalizer { LongRun, SimpleVariance };

inline std::string_view to_string(TestKind kind) {
  return kind == TestKind::TU ? "TU" : "TV";
}

inline std::string_view to_string(Normalizer n) {
  return n == Normalizer::LongRun ? "longrun" : "simple";
}

struct TestOptions {
  BandwidthRule rule = BandwidthRule::fourth_root();
  double alpha = 0.05;
  Normalizer normalizer = Normalizer::LongRun;
  unsigned threads = 1;  // per-panel normalizer workers; never changes results
};

struct TestResult {
  TestKind test = TestKind::TU;
  double statistic = 0.0;
  Index k_hat = 1;  // 1-based: the break falls after the first k_hat periods
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  double normalizer = 0.0;  // sum_i s_hat^2*_i
  Index bandwidth = 0;      // 0 for the simple-variance normalizer
  Index floored_panels = 0;
};

inline CusumProcess cusum_process(const ResidualPanel &residuals) {
  const Matrix &e = residuals.residuals;
  const Index len = e.cols();
  CusumProcess out{Vector(len - 1), Vector(len)};
  double running = 0.0;
  for (Index t = 0; t < len; ++t) {
    double column = 0.0;
    for (Index i = 0; i < e.rows(); ++i) column += e(i, t) * e(i, t);
    running += column;
    out.prefix_sums(t) = running;
  }
  const double total = out.prefix_sums(len - 1);
  for (Index k = 1; k < len; ++k) {
    out.values(k - 1) = out.prefix_sums(k - 1) -
                        static_cast<double>(k) / static_cast<double>(len) * total;
  }
  return out;
}

namespace detail {

struct PanelNormalizers {
  std::vector<double> values;
  Index bandwidth = 0;
  Index floored = 0;
};

// One normalizer per panel row. Rows are independent; the lowest failing row
// is reported so errors do not depend on the worker count.
inline PanelNormalizers panel_normalizers(const ResidualPanel &residuals,
                                          const TestOptions &options) {
  const Matrix &e = residuals.residuals;
  const auto n = static_cast<std::size_t>(e.rows());
  PanelNormalizers out;
  out.values.assign(n, 0.0);
  std::vector<char> floored(n, 0);
  std::vector<char> degenerate(n, 0);
  parallel_for(n, options.threads, [&](std::size_t i) {
    std::span<const double> row(e.row(static_cast<Index>(i)).data(),
                                static_cast<std::size_t>(e.cols()));
    try {
      if (options.normalizer == Normalizer::LongRun) {
        const LrvEstimate est = lrv_estimate(row, options.rule);
        out.values[i] = est.value;
        floored[i] = est.floored ? 1 : 0;
      } else {
        out.values[i] = simple_variance_sq(row);
      }
    } catch (const DegenerateSeries &) {
      degenerate[i] = 1;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (degenerate[i]) throw DegenerateSeries(i);
    out.floored += floored[i];
  }
  if (options.normalizer == Normalizer::LongRun) {
    out.bandwidth = resolve_bandwidth(e.cols(), options.rule).lag;
  }
  return out;
}

// argmax_k |values(k-1)|, smallest k on ties.
inline Index argmax_abs(const Vector &values, double &max_abs) {
  Index best = 1;
  max_abs = std::abs(values(0));
  for (Index k = 2; k <= values.size(); ++k) {
    const double v = std::abs(values(k - 1));
    if (v > max_abs) {
      max_abs = v;
      best = k;
    }
  }
  return best;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw OutOfRange("alpha must lie in (0, 1)");
  }
}

inline void finish(TestResult &r) {
  r.p_value = bb_sup_pvalue(r.statistic);
  r.reject = r.p_value < r.alpha;
}

}  // namespace detail

// T_U = max_k |U(k)| / sqrt(T * sum_i s_hat^2*_i). Squared residuals are
// pooled across panels before a single normalization.
inline TestResult t_u_test(const PanelData &panel, const TestOptions &options) {
  detail::check_alpha(options.alpha);
  const ResidualPanel residuals = demean_rows(panel);
  const detail::PanelNormalizers norm =
      detail::panel_normalizers(residuals, options);
  const CusumProcess process = cusum_process(residuals);

  TestResult r;
  r.test = TestKind::TU;
  r.alpha = options.alpha;
  r.bandwidth = norm.bandwidth;
  r.floored_panels = norm.floored;
  r.normalizer = 0.0;
  for (double s : norm.values) r.normalizer += s;
  double max_abs = 0.0;
  r.k_hat = detail::argmax_abs(process.values, max_abs);
  r.statistic =
      max_abs / std::sqrt(static_cast<double>(panel.periods()) * r.normalizer);
  detail::finish(r);
  return r;
}

inline TestResult t_u_test(const PanelData &panel, BandwidthRule rule,
                           double alpha) {
  return t_u_test(panel, TestOptions{rule, alpha});
}

// T_V = max_k |V(k)| with V(k) = N^{-1/2} sum_i C_i(k) / sqrt(s_hat^2*_i):
// each panel is normalized on its own before aggregation.
inline TestResult t_v_test(const PanelData &panel, const TestOptions &options) {
  detail::check_alpha(options.alpha);
  const ResidualPanel residuals = demean_rows(panel);
  const detail::PanelNormalizers norm =
      detail::panel_normalizers(residuals, options);
  const Matrix &e = residuals.residuals;
  const Index n = e.rows();
  const Index len = e.cols();

  std::vector<double> weight(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    weight[static_cast<std::size_t>(i)] =
        1.0 / std::sqrt(norm.values[static_cast<std::size_t>(i)]);
  }
  Vector prefix(len);
  double running = 0.0;
  for (Index t = 0; t < len; ++t) {
    double column = 0.0;
    for (Index i = 0; i < n; ++i) {
      column += weight[static_cast<std::size_t>(i)] * e(i, t) * e(i, t);
    }
    running += column;
    prefix(t) = running;
  }
  const double scale =
      1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(len));
  Vector v(len - 1);
  for (Index k = 1; k < len; ++k) {
    v(k - 1) = scale * (prefix(k - 1) - static_cast<double>(k) /
                                            static_cast<double>(len) *
                                            prefix(len - 1));
  }

  TestResult r;
  r.test = TestKind::TV;
  r.alpha = options.alpha;
  r.bandwidth = norm.bandwidth;
  r.floored_panels = norm.floored;
  for (double s : norm.values) r.normalizer += s;
  r.k_hat = detail::argmax_abs(v, r.statistic);
  detail::finish(r);
  return r;
}

inline TestResult t_v_test(const PanelData &panel, BandwidthRule rule,
                           double alpha) {
  return t_v_test(panel, TestOptions{rule, alpha});
}

inline TestResult run_test(TestKind kind, const PanelData &panel,
                           const TestOptions &options) {
  return kind == TestKind::TU ? t_u_test(panel, options)
                              : t_v_test(panel, options);
}

}  // namespace panelcusum

#endif  // PANELCUSUM_CUSUM_HPP_
