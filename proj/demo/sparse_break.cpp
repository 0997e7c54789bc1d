// Simulates a panel where only 10 of 100 units change scale halfway through,
// then runs T_U, T_V and binary segmentation on it.

#include <cstdio>

#include "panelcusum/panelcusum.hpp"

int main() {
  using namespace panelcusum;

  PanelSpec spec;
  spec.units = 100;
  spec.periods = 500;
  spec.t_star = 250;
  spec.rho = RhoRule::GeomHalf;
  spec.delta = delta::SparseA{};

  const GeneratedPanel g = gen_panel(spec, /*rep_index=*/0, /*seed=*/2024);
  std::printf("true break after t = %lld\n",
              static_cast<long long>(*g.t_star));

  for (TestKind kind : {TestKind::TU, TestKind::TV}) {
    const TestResult r = run_test(kind, g.panel, TestOptions{});
    std::printf("%s: statistic %.4f  p-value %.3g  k_hat %lld  %s\n",
                to_string(kind).data(), r.statistic, r.p_value,
                static_cast<long long>(r.k_hat),
                r.reject ? "reject" : "accept");
  }

  const SegmentationResult seg = binary_segment(g.panel, SegmentOptions{});
  std::printf("binary segmentation found %zu change-point(s):",
              seg.change_points.size());
  for (Index cp : seg.change_points) {
    std::printf(" %lld", static_cast<long long>(cp));
  }
  std::printf("\n");
  return 0;
}
