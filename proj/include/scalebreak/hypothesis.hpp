#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scalebreak/series.hpp"

namespace scalebreak {

/// Ansari-Bradley scale test outcome. `w` sums the ranks of the first sample;
/// `n_first` plays the role of n in the normalization, `n_second` of m.
struct ScaleTestOutcome {
  double w = 0.0;
  double w_star = 0.0;
  double p_value = 1.0;                  // two-sided, 2 min(Phi(W*), 1 - Phi(W*))
  double p_value_paper_onesided = 0.5;   // Phi(W*)
  bool reject = false;
  std::size_t n_first = 0;
  std::size_t n_second = 0;
};

/// Quantile/binomial regime test outcome.
struct TestOutcome {
  double statistic = 0.0;  // B: tested squares inside the reference quantile band
  double p_value = 1.0;
  bool reject = false;
  double quantile_lo = 0.0;
  double quantile_hi = 0.0;
  std::size_t n_reference = 0;  // |W1|
  std::size_t n_tested = 0;     // |W2|
  bool reference_is_first = true;
};

/// Positional scores from both ends towards the middle:
/// 1, 2, ..., 2, 1 (a single central peak when `total` is odd).
std::vector<std::int64_t> ab_ranks(std::int64_t total);

double standard_normal_cdf(double x);

ScaleTestOutcome ansari_bradley(std::span<const double> first, std::span<const double> second,
                                double alpha);
ScaleTestOutcome ansari_bradley(const TimeSeries& first, const TimeSeries& second, double alpha);

/// Linear interpolation between order statistics of a sorted sample
/// (position p (n - 1), zero based).
double empirical_quantile(std::span<const double> sorted, double p);

/// Exact two-sided tail probability 2 min(P(X <= k), P(X >= k)) for
/// X ~ Binomial(n, p), capped at 1.
double binomial_two_sided_p(std::size_t k, std::size_t n, double p);

/// Core of the quantile test on already squared samples: the band
/// [q_{alpha/2}, q_{1-alpha/2}] of `reference` is counted against `tested`.
TestOutcome quantile_binomial_counts(std::span<const double> reference,
                                     std::span<const double> tested, double alpha);

/// Splits after observation `l` (1-based, 2 <= l <= n-2). The segment with
/// the smaller empirical standard deviation provides the reference band.
TestOutcome quantile_binomial_test(const TimeSeries& series, std::size_t l, double alpha);

}  // namespace scalebreak
