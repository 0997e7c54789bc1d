#ifndef PANELCUSUM_SIMULATE_HPP_
#define PANELCUSUM_SIMULATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "panelcusum/cusum.hpp"
#include "panelcusum/parallel.hpp"

namespace panelcusum {

// ---------------------------------------------------------------------------
// Random streams

using Engine = std::mt19937_64;

// Independent engine for one (seed, replication) pair. The stream depends
// only on its key, so replications can run on any worker in any order.
inline Engine make_stream(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep),
                    static_cast<std::uint32_t>(rep >> 32), 0x70616e65u};
  return Engine(seq);
}

// ---------------------------------------------------------------------------
// Temporal dependence

enum class RhoRule { White, GeomHalf, InvSquare };
enum class ErrorLaw { Gaussian, StdGamma };
enum class MuLaw { Uniform01, Zero };
enum class SigmaLaw { Uniform12, One };

// rho_0..rho_{T-1}. InvSquare uses rho_0 = 1, rho_h = h^-2 for h >= 1.
inline std::vector<double> rho_sequence(RhoRule rule, Index periods) {
  std::vector<double> rho(static_cast<std::size_t>(periods), 0.0);
  if (periods == 0) return rho;
  rho[0] = 1.0;
  for (Index h = 1; h < periods; ++h) {
    const auto hd = static_cast<double>(h);
    switch (rule) {
      case RhoRule::White:
        break;
      case RhoRule::GeomHalf:
        rho[static_cast<std::size_t>(h)] = std::ldexp(1.0, -static_cast<int>(std::min<Index>(h, 2000)));
        break;
      case RhoRule::InvSquare:
        rho[static_cast<std::size_t>(h)] = 1.0 / (hd * hd);
        break;
    }
  }
  return rho;
}

struct ToeplitzFactor {
  Matrix lower;           // Gamma with Gamma Gamma^T = (repaired) Toeplitz(rho)
  bool repaired = false;  // eigenvalue clipping was needed
};

inline Matrix toeplitz_matrix(std::span<const double> rho) {
  const auto n = static_cast<Index>(rho.size());
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      m(i, j) = rho[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return m;
}

// Cholesky factor of the Toeplitz matrix of rho. When that matrix is not
// positive definite its eigenvalues are clipped at 1e-8 * rho_0, the diagonal
// is rescaled back to rho_0, and the repaired matrix is factored instead.
inline ToeplitzFactor toeplitz_factor(std::span<const double> rho) {
  if (rho.empty() || !(rho[0] > 0.0)) {
    throw NotFactorable("rho_0 must be positive");
  }
  const Matrix target = toeplitz_matrix(rho);
  ToeplitzFactor out;
  {
    Eigen::LLT<Matrix> llt(target);
    if (llt.info() == Eigen::Success) {
      out.lower = llt.matrixL();
      return out;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(target);
  if (eig.info() != Eigen::Success) {
    throw NotFactorable("eigendecomposition failed");
  }
  Vector lambda = eig.eigenvalues();
  if (!(lambda.maxCoeff() > 0.0)) {
    throw NotFactorable("Toeplitz matrix has no positive eigenvalue");
  }
  lambda = lambda.cwiseMax(1e-8 * rho[0]);
  const Matrix &v = eig.eigenvectors();
  Matrix repaired = v * lambda.asDiagonal() * v.transpose();
  const Vector inv_sd = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = (inv_sd.asDiagonal() * repaired * inv_sd.asDiagonal()) * rho[0];
  Eigen::LLT<Matrix> llt(repaired);
  if (llt.info() != Eigen::Success) {
    throw NotFactorable("repaired Toeplitz matrix is still not factorable");
  }
  out.lower = llt.matrixL();
  out.repaired = true;
  return out;
}

// Maps i.i.d. innovations z (unit variance) onto a row e with Cov(e) equal to
// the Toeplitz matrix of rho. A geometric rho (rho_h = r^h) is an AR(1)
// correlation whose Cholesky factor applied to z is exactly the recursion
// e_1 = z_1, e_t = r e_{t-1} + sqrt(1 - r^2) z_t; every other rho goes
// through the dense factor.
class CorrelatedNoise {
 public:
  CorrelatedNoise(RhoRule rule, Index periods) : periods_(periods) {
    if (rule == RhoRule::White) {
      mode_ = Mode::White;
    } else if (rule == RhoRule::GeomHalf) {
      mode_ = Mode::Ar1;
      ar_ = 0.5;
    } else {
      const std::vector<double> rho = rho_sequence(rule, periods);
      mode_ = Mode::Dense;
      factor_ = std::make_shared<ToeplitzFactor>(toeplitz_factor(rho));
    }
  }

  explicit CorrelatedNoise(std::span<const double> rho)
      : periods_(static_cast<Index>(rho.size())) {
    mode_ = Mode::Dense;
    factor_ = std::make_shared<ToeplitzFactor>(toeplitz_factor(rho));
  }

  Index periods() const noexcept { return periods_; }
  bool repaired() const noexcept { return factor_ && factor_->repaired; }

  // Rows of z are independent innovation vectors; returns z Gamma^T.
  Matrix apply(const Matrix &z) const {
    switch (mode_) {
      case Mode::White:
        return z;
      case Mode::Ar1: {
        Matrix e(z.rows(), z.cols());
        const double innov = std::sqrt(1.0 - ar_ * ar_);
        for (Index i = 0; i < z.rows(); ++i) {
          double prev = z(i, 0);
          e(i, 0) = prev;
          for (Index t = 1; t < z.cols(); ++t) {
            prev = ar_ * prev + innov * z(i, t);
            e(i, t) = prev;
          }
        }
        return e;
      }
      case Mode::Dense:
        break;
    }
    return z * factor_->lower.transpose().triangularView<Eigen::Upper>();
  }

 private:
  enum class Mode { White, Ar1, Dense };
  Mode mode_ = Mode::White;
  Index periods_;
  double ar_ = 0.0;
  std::shared_ptr<const ToeplitzFactor> factor_;
};

// ---------------------------------------------------------------------------
// Panel specification and generation

namespace delta {
struct None {};
struct NonSparseA {};  // delta_i ~ U(-0.5, 0.5)
struct NonSparseB {};  // delta_i ~ U(-0.5, 1)
struct SparseA {};     // 10 random panels: 5 at +1.5, 5 at -0.5
struct SparseB {};     // 10 random panels at -0.5
struct FixedUniform {  // m random panels at delta
  double delta;
  Index m;
};
struct Custom {
  std::vector<double> values;
};
}  // namespace delta

using DeltaScheme =
    std::variant<delta::None, delta::NonSparseA, delta::NonSparseB,
                 delta::SparseA, delta::SparseB, delta::FixedUniform,
                 delta::Custom>;

struct PanelSpec {
  Index units = 100;    // N
  Index periods = 500;  // T
  std::optional<Index> t_star;  // last pre-break period; none under H0
  RhoRule rho = RhoRule::GeomHalf;
  ErrorLaw error = ErrorLaw::Gaussian;
  MuLaw mu = MuLaw::Uniform01;
  SigmaLaw sigma = SigmaLaw::Uniform12;
  DeltaScheme delta = delta::None{};
};

struct GeneratedPanel {
  PanelData panel;
  std::optional<Index> t_star;
  Vector mu;
  Vector sigma;
  Vector delta;
};

inline void validate_spec(const PanelSpec &spec) {
  if (spec.units < 1) throw InvalidSpec("N must be at least 1");
  if (spec.periods < 3) throw InvalidSpec("T must be at least 3");
  if (spec.t_star && (*spec.t_star < 1 || *spec.t_star > spec.periods - 1)) {
    throw InvalidSpec("t_star must lie in [1, T-1]");
  }
  if ((std::holds_alternative<delta::SparseA>(spec.delta) ||
       std::holds_alternative<delta::SparseB>(spec.delta)) &&
      spec.units < 10) {
    throw InvalidSpec("sparse delta schemes need N >= 10");
  }
  if (const auto *f = std::get_if<delta::FixedUniform>(&spec.delta)) {
    if (f->m < 0 || f->m > spec.units) {
      throw InvalidSpec("FixedUniform m must lie in [0, N]");
    }
  }
  if (const auto *c = std::get_if<delta::Custom>(&spec.delta)) {
    if (static_cast<Index>(c->values.size()) != spec.units) {
      throw InvalidSpec("Custom delta needs exactly N values");
    }
  }
}

namespace detail {

inline double draw_innovation(ErrorLaw law, Engine &rng) {
  if (law == ErrorLaw::Gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return normal(rng);
  }
  std::gamma_distribution<double> gamma(4.0, 1.0);
  return (gamma(rng) - 4.0) / 2.0;
}

// k distinct indices out of [0, n), uniformly (partial Fisher-Yates).
inline std::vector<Index> choose_indices(Index n, Index k, Engine &rng) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(all[static_cast<std::size_t>(i)],
              all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(k));
  return all;
}

inline Vector draw_delta(const PanelSpec &spec, Engine &rng) {
  const Index n = spec.units;
  Vector d = Vector::Zero(n);
  std::visit(
      [&](const auto &scheme) {
        using S = std::decay_t<decltype(scheme)>;
        if constexpr (std::is_same_v<S, delta::NonSparseA>) {
          std::uniform_real_distribution<double> u(-0.5, 0.5);
          for (Index i = 0; i < n; ++i) d(i) = u(rng);
        } else if constexpr (std::is_same_v<S, delta::NonSparseB>) {
          std::uniform_real_distribution<double> u(-0.5, 1.0);
          for (Index i = 0; i < n; ++i) d(i) = u(rng);
        } else if constexpr (std::is_same_v<S, delta::SparseA>) {
          const auto idx = choose_indices(n, 10, rng);
          for (std::size_t j = 0; j < idx.size(); ++j) {
            d(idx[j]) = j < 5 ? 1.5 : -0.5;
          }
        } else if constexpr (std::is_same_v<S, delta::SparseB>) {
          for (Index i : choose_indices(n, 10, rng)) d(i) = -0.5;
        } else if constexpr (std::is_same_v<S, delta::FixedUniform>) {
          for (Index i : choose_indices(n, scheme.m, rng)) d(i) = scheme.delta;
        } else if constexpr (std::is_same_v<S, delta::Custom>) {
          for (Index i = 0; i < n; ++i) {
            d(i) = scheme.values[static_cast<std::size_t>(i)];
          }
        }
      },
      spec.delta);
  return d;
}

inline double draw_sigma(SigmaLaw law, Engine &rng) {
  if (law == SigmaLaw::One) return 1.0;
  std::uniform_real_distribution<double> u(1.0, 2.0);
  return u(rng);
}

}  // namespace detail

// One replication of X = mu + Delta (Hadamard) e. `noise` must have been
// built for spec.rho and spec.periods; studies build it once and share it.
inline GeneratedPanel gen_panel(const PanelSpec &spec, std::uint64_t rep_index,
                                std::uint64_t seed,
                                const CorrelatedNoise &noise) {
  validate_spec(spec);
  if (noise.periods() != spec.periods) {
    throw InvalidSpec("noise generator built for a different T");
  }
  Engine rng = make_stream(seed, rep_index);
  const Index n = spec.units;
  const Index len = spec.periods;

  Vector mu(n);
  Vector sigma(n);
  for (Index i = 0; i < n; ++i) {
    if (spec.mu == MuLaw::Zero) {
      mu(i) = 0.0;
    } else {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      mu(i) = u(rng);
    }
    sigma(i) = detail::draw_sigma(spec.sigma, rng);
  }
  Vector d = spec.t_star ? detail::draw_delta(spec, rng) : Vector::Zero(n);
  // Post-break scale must stay positive; redraw the panel's delta when the
  // scheme is random, otherwise its sigma.
  for (Index i = 0; i < n; ++i) {
    int attempts = 0;
    while (!(sigma(i) + d(i) > 0.0)) {
      if (++attempts > 1000) {
        throw InvalidSpec("cannot draw sigma_i + delta_i > 0 for panel " +
                          std::to_string(i));
      }
      if (std::holds_alternative<delta::NonSparseA>(spec.delta) ||
          std::holds_alternative<delta::NonSparseB>(spec.delta)) {
        PanelSpec single = spec;
        single.units = 1;
        d(i) = detail::draw_delta(single, rng)(0);
      } else {
        sigma(i) = detail::draw_sigma(spec.sigma, rng);
      }
    }
  }

  Matrix z(n, len);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < len; ++t) {
      z(i, t) = detail::draw_innovation(spec.error, rng);
    }
  }
  Matrix x = noise.apply(z);
  const Index cut = spec.t_star.value_or(len);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < len; ++t) {
      const double scale = t < cut ? sigma(i) : sigma(i) + d(i);
      x(i, t) = mu(i) + scale * x(i, t);
    }
  }
  return {validate_panel(std::move(x)), spec.t_star, std::move(mu),
          std::move(sigma), std::move(d)};
}

inline GeneratedPanel gen_panel(const PanelSpec &spec, std::uint64_t rep_index,
                                std::uint64_t seed) {
  return gen_panel(spec, rep_index, seed,
                   CorrelatedNoise(spec.rho, spec.periods));
}

// ---------------------------------------------------------------------------
// Monte Carlo studies

struct SimConfig {
  PanelSpec spec;
  Index replications = 1000;  // M
  std::uint64_t seed = 1;
  std::vector<TestKind> tests{TestKind::TU, TestKind::TV};
  double alpha = 0.05;
  BandwidthRule rule = BandwidthRule::fourth_root();
  Normalizer normalizer = Normalizer::LongRun;
  double accuracy_window_frac = 0.05;
  unsigned threads = 1;

  Index accuracy_window() const {
    return static_cast<Index>(
        std::floor(accuracy_window_frac * static_cast<double>(spec.periods)));
  }
};

struct TestSummary {
  TestKind test = TestKind::TU;
  double rejection_rate = 0.0;
  std::optional<double> accuracy;  // only under an alternative with t_star
  double mean_statistic = 0.0;
  std::optional<double> sd_statistic;  // needs at least two replications
  std::optional<double> snr;
  Index floored_panels = 0;
  std::vector<double> statistics;  // per replication, in replication order
  std::vector<Index> k_hats;
};

struct StudyReport {
  SimConfig config;
  Index completed = 0;
  Index failures = 0;
  bool noise_repaired = false;
  std::vector<TestSummary> summaries;
  std::optional<double> dominance_prob;  // P(T_U > T_V) when both ran

  const TestSummary *find(TestKind kind) const {
    for (const auto &s : summaries) {
      if (s.test == kind) return &s;
    }
    return nullptr;
  }
};

inline StudyReport run_study(const SimConfig &config) {
  validate_spec(config.spec);
  if (config.replications < 1) throw InvalidSpec("M must be at least 1");
  if (config.tests.empty()) throw InvalidSpec("no tests selected");
  detail::check_alpha(config.alpha);

  const CorrelatedNoise noise(config.spec.rho, config.spec.periods);
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t ntests = config.tests.size();

  struct Outcome {
    bool failed = false;
    std::vector<TestResult> results;
  };
  std::vector<Outcome> outcomes(reps);
  TestOptions topt;
  topt.rule = config.rule;
  topt.alpha = config.alpha;
  topt.normalizer = config.normalizer;

  parallel_for(reps, config.threads, [&](std::size_t r) {
    try {
      const GeneratedPanel g = gen_panel(config.spec, r, config.seed, noise);
      std::vector<TestResult> results;
      results.reserve(ntests);
      for (TestKind kind : config.tests) {
        results.push_back(run_test(kind, g.panel, topt));
      }
      outcomes[r].results = std::move(results);
    } catch (const DegenerateSeries &) {
      outcomes[r].failed = true;
    }
  });

  StudyReport report;
  report.config = config;
  report.noise_repaired = noise.repaired();
  for (const auto &o : outcomes) report.failures += o.failed ? 1 : 0;
  report.completed = config.replications - report.failures;
  if (static_cast<double>(report.failures) >
      0.01 * static_cast<double>(config.replications)) {
    throw StudyAborted(static_cast<std::size_t>(report.failures), reps);
  }

  const Index window = config.accuracy_window();
  const double denom = static_cast<double>(config.replications);
  for (std::size_t j = 0; j < ntests; ++j) {
    TestSummary s;
    s.test = config.tests[j];
    Index rejects = 0;
    Index hits = 0;
    for (const auto &o : outcomes) {
      if (o.failed) continue;
      const TestResult &res = o.results[j];
      s.statistics.push_back(res.statistic);
      s.k_hats.push_back(res.k_hat);
      s.floored_panels += res.floored_panels;
      if (res.reject) {
        ++rejects;
        if (config.spec.t_star &&
            std::abs(res.k_hat - *config.spec.t_star) <= window) {
          ++hits;
        }
      }
    }
    s.rejection_rate = static_cast<double>(rejects) / denom;
    if (config.spec.t_star) s.accuracy = static_cast<double>(hits) / denom;
    const auto count = static_cast<double>(s.statistics.size());
    if (!s.statistics.empty()) {
      double sum = 0.0;
      for (double v : s.statistics) sum += v;
      s.mean_statistic = sum / count;
    }
    if (s.statistics.size() >= 2) {
      double ss = 0.0;
      for (double v : s.statistics) {
        ss += (v - s.mean_statistic) * (v - s.mean_statistic);
      }
      s.sd_statistic = std::sqrt(ss / (count - 1.0));
      if (*s.sd_statistic > 0.0) s.snr = s.mean_statistic / *s.sd_statistic;
    }
    report.summaries.push_back(std::move(s));
  }

  const TestSummary *tu = report.find(TestKind::TU);
  const TestSummary *tv = report.find(TestKind::TV);
  if (tu && tv && !tu->statistics.empty()) {
    Index wins = 0;
    for (std::size_t r = 0; r < tu->statistics.size(); ++r) {
      if (tu->statistics[r] > tv->statistics[r]) ++wins;
    }
    report.dominance_prob =
        static_cast<double>(wins) / static_cast<double>(tu->statistics.size());
  }
  return report;
}

// Sparse design used to compare SNR: N = 50, T = 100, t* = 50, m = 5 panels
// with scale 1 + 0.8 after the break, i.i.d. N(0,1) errors, mu = 0, sigma = 1,
// simple-variance normalizers.
inline SimConfig snr_design(Index replications = 1000, std::uint64_t seed = 1) {
  SimConfig c;
  c.spec.units = 50;
  c.spec.periods = 100;
  c.spec.t_star = 50;
  c.spec.rho = RhoRule::White;
  c.spec.error = ErrorLaw::Gaussian;
  c.spec.mu = MuLaw::Zero;
  c.spec.sigma = SigmaLaw::One;
  c.spec.delta = delta::FixedUniform{0.8, 5};
  c.replications = replications;
  c.seed = seed;
  c.tests = {TestKind::TU, TestKind::TV};
  c.normalizer = Normalizer::SimpleVariance;
  return c;
}

// run_study with both tests and simple-variance normalizers, so the report
// always carries per-test SNR and P(T_U > T_V).
inline StudyReport snr_comparison(SimConfig config) {
  config.tests = {TestKind::TU, TestKind::TV};
  config.normalizer = Normalizer::SimpleVariance;
  return run_study(config);
}

}  // namespace panelcusum

#endif  // PANELCUSUM_SIMULATE_HPP_
