#include "scalebreak/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("significance level must lie in (0, 1)");
  }
}

double sample_sd(std::span<const double> xs) {
  long double mean = 0.0L;
  for (double x : xs) {
    mean += x;
  }
  mean /= static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (double x : xs) {
    const long double d = x - mean;
    ss += d * d;
  }
  return std::sqrt(static_cast<double>(ss / static_cast<long double>(xs.size() - 1)));
}

double log_binomial_pmf(std::size_t k, std::size_t n, double log_p, double log_q) {
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * log_p + (nd - kd) * log_q;
}

}  // namespace

std::vector<std::int64_t> ab_ranks(std::int64_t total) {
  if (total < 1) {
    throw InvalidInput("rank vector length must be positive");
  }
  std::vector<std::int64_t> ranks(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) {
    ranks[static_cast<std::size_t>(i)] = std::min(i + 1, total - i);
  }
  return ranks;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

ScaleTestOutcome ansari_bradley(std::span<const double> first, std::span<const double> second,
                                double alpha) {
  if (first.empty() || second.empty()) {
    throw InvalidInput("Ansari-Bradley test needs two nonempty samples");
  }
  check_alpha(alpha);
  const std::size_t n = first.size();
  const std::size_t m = second.size();
  const std::size_t total = n + m;

  struct Item {
    double value;
    bool from_first;
  };
  std::vector<Item> pooled;
  pooled.reserve(total);
  for (double x : first) {
    pooled.push_back({x, true});
  }
  for (double x : second) {
    pooled.push_back({x, false});
  }
  std::sort(pooled.begin(), pooled.end(),
            [](const Item& a, const Item& b) { return a.value < b.value; });
  const auto scores = ab_ranks(static_cast<std::int64_t>(total));

  // Tied values share the mean of their positional scores.
  double w = 0.0;
  for (std::size_t lo = 0; lo < total;) {
    std::size_t hi = lo + 1;
    while (hi < total && pooled[hi].value == pooled[lo].value) {
      ++hi;
    }
    double score_sum = 0.0;
    std::size_t from_first = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      score_sum += static_cast<double>(scores[i]);
      from_first += pooled[i].from_first ? 1 : 0;
    }
    w += static_cast<double>(from_first) * score_sum / static_cast<double>(hi - lo);
    lo = hi;
  }

  const auto nd = static_cast<double>(n);
  const auto md = static_cast<double>(m);
  const auto nm = nd + md;
  double mean = 0.0;
  double variance = 0.0;
  if (total % 2 == 0) {
    mean = nd * (nm + 2.0) / 4.0;
    variance = nd * md * (nm + 2.0) * (nm - 2.0) / (48.0 * (nm - 1.0));
  } else {
    mean = nd * (nm + 1.0) * (nm + 1.0) / (4.0 * nm);
    variance = nd * md * (nm + 1.0) * (3.0 + nm * nm) / (48.0 * nm * nm);
  }

  ScaleTestOutcome out;
  out.w = w;
  out.n_first = n;
  out.n_second = m;
  // With two observations in total the statistic is constant.
  out.w_star = variance > 0.0 ? (w - mean) / std::sqrt(variance) : 0.0;
  const double phi = standard_normal_cdf(out.w_star);
  out.p_value_paper_onesided = phi;
  out.p_value = std::min(1.0, 2.0 * std::min(phi, 1.0 - phi));
  out.reject = out.p_value <= alpha;
  return out;
}

ScaleTestOutcome ansari_bradley(const TimeSeries& first, const TimeSeries& second, double alpha) {
  return ansari_bradley(first.values(), second.values(), alpha);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw InvalidInput("quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("quantile probability must lie in [0, 1]");
  }
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double binomial_two_sided_p(std::size_t k, std::size_t n, double p) {
  if (k > n) {
    throw InvalidInput("binomial count exceeds the number of trials");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("binomial probability must lie in [0, 1]");
  }
  if (p == 0.0 || p == 1.0) {
    const std::size_t certain = p == 0.0 ? 0 : n;
    return k == certain ? 1.0 : 0.0;
  }
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  // Each tail summed from its far end so the small terms accumulate first.
  double lower = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    lower += std::exp(log_binomial_pmf(i, n, log_p, log_q));
  }
  double upper = 0.0;
  for (std::size_t i = n + 1; i-- > k;) {
    upper += std::exp(log_binomial_pmf(i, n, log_p, log_q));
  }
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

TestOutcome quantile_binomial_counts(std::span<const double> reference,
                                     std::span<const double> tested, double alpha) {
  check_alpha(alpha);
  if (reference.empty() || tested.empty()) {
    throw InvalidInput("quantile test needs two nonempty samples");
  }
  std::vector<double> sorted(reference.begin(), reference.end());
  std::sort(sorted.begin(), sorted.end());
  TestOutcome out;
  out.quantile_lo = empirical_quantile(sorted, alpha / 2.0);
  out.quantile_hi = empirical_quantile(sorted, 1.0 - alpha / 2.0);
  std::size_t inside = 0;
  for (double w : tested) {
    if (out.quantile_lo <= w && w <= out.quantile_hi) {
      ++inside;
    }
  }
  out.statistic = static_cast<double>(inside);
  out.n_reference = reference.size();
  out.n_tested = tested.size();
  out.p_value = binomial_two_sided_p(inside, tested.size(), 1.0 - alpha);
  out.reject = out.p_value <= alpha;
  return out;
}

TestOutcome quantile_binomial_test(const TimeSeries& series, std::size_t l, double alpha) {
  check_alpha(alpha);
  const std::size_t n = series.size();
  if (n < 4 || l < 2 || l > n - 2) {
    throw InvalidInput("split index must satisfy 2 <= l <= n - 2");
  }
  const auto values = series.values();
  const auto head = values.first(l);
  const auto tail = values.subspan(l);
  const bool head_is_reference = sample_sd(head) <= sample_sd(tail);
  auto squares = [](std::span<const double> xs) {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [](double x) { return x * x; });
    return out;
  };
  const auto w_head = squares(head);
  const auto w_tail = squares(tail);
  TestOutcome out = head_is_reference ? quantile_binomial_counts(w_head, w_tail, alpha)
                                      : quantile_binomial_counts(w_tail, w_head, alpha);
  out.reference_is_first = head_is_reference;
  return out;
}

}  // namespace scalebreak
