#ifndef PANELCUSUM_SEGMENTATION_HPP_
#define PANELCUSUM_SEGMENTATION_HPP_

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "panelcusum/cusum.hpp"

namespace panelcusum {

struct SegmentOptions {
  TestKind test = TestKind::TU;
  TestOptions test_options;
  // Shortest segment a split may leave behind. Unset means
  // max(20, 2 h_T + 2) with h_T resolved from the full panel length.
  std::optional<Index> min_seg;
  // Run sibling segments concurrently (results are identical either way).
  bool parallel_branches = false;
};

// One tested segment [start, end) in global 0-based column coordinates.
struct SegmentRecord {
  Index start = 0;
  Index end = 0;
  Index depth = 0;
  std::optional<TestResult> result;
  // Global change-point (number of columns before the break) when the
  // segment rejected: the test's k_hat, or the argmax of |U| over
  // [min_seg, length - min_seg] when k_hat sits closer than min_seg to an end.
  std::optional<Index> change_point;
  std::string error;  // error kind when the test could not run
};

struct SegmentationResult {
  std::vector<Index> change_points;  // strictly increasing, 1..T-1
  std::vector<SegmentRecord> tree;   // pre-order by segment start
  Index min_seg = 0;
};

inline Index default_min_seg(Index periods, BandwidthRule rule) {
  const Index h = resolve_bandwidth(periods, rule).lag;
  return std::max<Index>(20, 2 * h + 2);
}

namespace detail {

inline Index constrained_split(const PanelData &segment, Index min_seg) {
  const CusumProcess process = cusum_process(demean_rows(segment));
  const Index len = segment.periods();
  Index best = min_seg;
  double best_abs = -1.0;
  for (Index k = min_seg; k <= len - min_seg; ++k) {
    const double v = std::abs(process.at(k));
    if (v > best_abs) {
      best_abs = v;
      best = k;
    }
  }
  return best;
}

inline std::vector<SegmentRecord> segment_recursive(const PanelData &panel,
                                                    Index start, Index end,
                                                    Index depth,
                                                    const SegmentOptions &opt,
                                                    Index min_seg) {
  std::vector<SegmentRecord> out;
  if (end - start < 2 * min_seg) {
    return out;
  }
  SegmentRecord rec;
  rec.start = start;
  rec.end = end;
  rec.depth = depth;
  const PanelData segment = panel.columns(start, end - start);
  try {
    rec.result = run_test(opt.test, segment, opt.test_options);
  } catch (const Error &e) {
    rec.error = e.kind();
    out.push_back(std::move(rec));
    return out;
  }
  if (!rec.result->reject) {
    out.push_back(std::move(rec));
    return out;
  }
  const Index k = rec.result->k_hat >= min_seg &&
                          rec.result->k_hat <= (end - start) - min_seg
                      ? rec.result->k_hat
                      : constrained_split(segment, min_seg);
  rec.change_point = start + k;
  out.push_back(std::move(rec));

  const Index split = start + k;
  std::vector<SegmentRecord> left;
  std::vector<SegmentRecord> right;
  if (opt.parallel_branches) {
    auto pending = std::async(std::launch::async, [&] {
      return segment_recursive(panel, split, end, depth + 1, opt, min_seg);
    });
    left = segment_recursive(panel, start, split, depth + 1, opt, min_seg);
    right = pending.get();
  } else {
    left = segment_recursive(panel, start, split, depth + 1, opt, min_seg);
    right = segment_recursive(panel, split, end, depth + 1, opt, min_seg);
  }
  out.insert(out.end(), std::make_move_iterator(left.begin()),
             std::make_move_iterator(left.end()));
  out.insert(out.end(), std::make_move_iterator(right.begin()),
             std::make_move_iterator(right.end()));
  return out;
}

}  // namespace detail

// Binary segmentation: test the whole panel, split at the estimated break
// when the test rejects, and recurse on both halves with the same alpha.
// Each sub-segment is demeaned and gets its bandwidth from its own length.
inline SegmentationResult binary_segment(const PanelData &panel,
                                         const SegmentOptions &options) {
  detail::check_alpha(options.test_options.alpha);
  SegmentationResult out;
  out.min_seg = options.min_seg.value_or(
      default_min_seg(panel.periods(), options.test_options.rule));
  if (out.min_seg < 3) {
    throw OutOfRange("min_seg must be at least 3");
  }
  out.tree = detail::segment_recursive(panel, 0, panel.periods(), 0, options,
                                       out.min_seg);
  for (const SegmentRecord &rec : out.tree) {
    if (rec.change_point) out.change_points.push_back(*rec.change_point);
  }
  std::sort(out.change_points.begin(), out.change_points.end());
  return out;
}

inline SegmentationResult binary_segment(const PanelData &panel, TestKind test,
                                         double alpha, BandwidthRule rule,
                                         Index min_seg) {
  SegmentOptions opt;
  opt.test = test;
  opt.test_options.alpha = alpha;
  opt.test_options.rule = rule;
  opt.min_seg = min_seg;
  return binary_segment(panel, opt);
}

}  // namespace panelcusum

#endif  // PANELCUSUM_SEGMENTATION_HPP_
