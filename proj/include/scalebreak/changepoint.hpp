#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "scalebreak/hypothesis.hpp"
#include "scalebreak/mars.hpp"
#include "scalebreak/series.hpp"

namespace scalebreak {

enum class BreakMethod {
  VMars,     // hinge model on the V statistic selected by adaptive splines
  CTwoLine,  // unconstrained two-segment regression on the C statistic
};

const char* to_string(BreakMethod method);

/// Lines y = a + b j on each side of the break: (a1, b1) for j <= l,
/// (a2, b2) for j > l.
struct SegmentLines {
  double a1 = 0.0;
  double b1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
};

/// Least-squares fit of V_j = beta0 + beta1 (j - knot)+ + beta2 (knot - j)+.
struct HingeFit {
  double knot = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double sse = 0.0;

  /// Per-side lines implied by the hinge coefficients, split at `knot`.
  SegmentLines lines() const;
};

struct ChangePointResult {
  BreakMethod method = BreakMethod::VMars;
  /// Number of observations in the first regime, 1 <= l_hat <= n - 1.
  std::size_t l_hat = 0;
  SegmentLines lines;
  /// GCV of the pruned spline model (VMars) or the total two-segment SSE (CTwoLine).
  double objective = 0.0;
  /// VMars only: the constrained hinge refit at l_hat and the pruned model.
  std::optional<HingeFit> hinge;
  std::optional<MarsModel> mars;
};

/// Hinge refit of `values` (indexed j = 1..n) at a fixed knot.
HingeFit fit_hinge(std::span<const double> values, double knot);

/// Break estimate from the V statistic. Returns nullopt when the pruned
/// spline keeps no interior knot (V is linear, no break candidate).
/// Throws InsufficientData for n < 10.
std::optional<ChangePointResult> estimate_l_v(const TimeSeries& series, const MarsConfig& config);

/// Break estimate from the C statistic: the split k in [2, n-2] minimizing
/// the summed SSE of separate OLS lines on both sides. Ties go to the
/// smallest k. Throws InsufficientData for n < 6.
ChangePointResult estimate_l_c(const TimeSeries& series);

/// Summed OLS SSE of the two-segment fit at every k; entry k - 2 holds split
/// k for k = 2..n-2.
std::vector<double> two_line_sse_profile(std::span<const double> values);

/// 1-based inclusive index range.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

using SegmentPair = std::pair<IndexRange, IndexRange>;

SegmentPair split_ranges(std::size_t n, std::size_t l);

struct SegmentationReport {
  std::size_t n = 0;
  double alpha = 0.05;
  std::optional<ChangePointResult> result_v;  // nullopt: no break candidate
  ChangePointResult result_c;
  std::optional<ScaleTestOutcome> test_v;
  TestOutcome test_c;
  std::optional<SegmentPair> segments_v;
  SegmentPair segments_c;
};

SegmentationReport segment(const TimeSeries& series, double alpha, const MarsConfig& config);

}  // namespace scalebreak
