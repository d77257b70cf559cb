#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "scalebreak/changepoint.hpp"
#include "scalebreak/errors.hpp"
#include "scalebreak/random.hpp"

namespace sb = scalebreak;

namespace {

// Magnitude `a` for the first `l` observations, `b` afterwards, with
// alternating signs so the median is zero.
std::vector<double> two_level(std::size_t l, std::size_t n, double a, double b) {
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = i < l ? a : b;
    xs.push_back(i % 2 == 0 ? mag : -mag);
  }
  return xs;
}

std::vector<double> gaussian_break(std::size_t l, std::size_t n, double s1, double s2,
                                   std::uint64_t seed) {
  sb::RandomStream rng(seed, 17);
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(rng.normal() * (i < l ? s1 : s2));
  }
  return xs;
}

// Plain O(n^3) reference: for each split, recompute both OLS fits from scratch.
std::size_t naive_l_c(const std::vector<double>& xs) {
  std::vector<double> c;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i <= j; ++i) {
      s += xs[i] * xs[i];
    }
    c.push_back(s);
  }
  const std::size_t n = c.size();
  auto sse = [&](std::size_t first, std::size_t last) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      mx += static_cast<double>(j);
      my += c[j - 1];
    }
    const double cnt = static_cast<double>(last - first + 1);
    mx /= cnt;
    my /= cnt;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      sxx += (static_cast<double>(j) - mx) * (static_cast<double>(j) - mx);
      sxy += (static_cast<double>(j) - mx) * (c[j - 1] - my);
    }
    const double b = sxy / sxx;
    double out = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      const double r = c[j - 1] - my - b * (static_cast<double>(j) - mx);
      out += r * r;
    }
    return out;
  };
  std::size_t best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k <= n - 2; ++k) {
    const double total = sse(1, k) + sse(k + 1, n);
    if (total < best) {
      best = total;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace

TEST(EstimateLV, ExactHingeFromTwoMagnitudes) {
  const auto xs = two_level(6, 12, 1.0, 3.0);
  const auto r = sb::estimate_l_v(sb::TimeSeries(xs), {});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->l_hat, 6u);
  EXPECT_EQ(r->method, sb::BreakMethod::VMars);
  ASSERT_TRUE(r->hinge.has_value());
  EXPECT_LT(r->hinge->sse, 1e-12);
  EXPECT_NEAR(r->lines.b1, 1.0, 1e-9);
  EXPECT_NEAR(r->lines.b2, 3.0, 1e-9);
}

TEST(EstimateLV, ConstantMagnitudeHasNoBreak) {
  const auto xs = two_level(0, 100, 1.0, 1.0);
  const auto r = sb::estimate_l_v(sb::TimeSeries(xs), {});
  EXPECT_FALSE(r.has_value());
  const auto report = sb::segment(sb::TimeSeries(xs), 0.05, {});
  if (report.test_v) {
    EXPECT_FALSE(report.test_v->reject);
  }
}

TEST(EstimateLV, PlantedKnotRecoveredAtSeveralLengths) {
  for (std::size_t n : {10u, 100u, 1800u}) {
    const std::size_t l = n / 3;
    const auto r = sb::estimate_l_v(sb::TimeSeries(two_level(l, n, 1.0, 2.5)), {});
    ASSERT_TRUE(r.has_value()) << n;
    EXPECT_EQ(r->l_hat, l) << n;
  }
}

TEST(EstimateLV, ReversalMapsBreakToComplement) {
  auto xs = two_level(4, 12, 1.0, 3.0);
  const auto forward = sb::estimate_l_v(sb::TimeSeries(xs), {});
  std::reverse(xs.begin(), xs.end());
  const auto backward = sb::estimate_l_v(sb::TimeSeries(xs), {});
  ASSERT_TRUE(forward && backward);
  EXPECT_EQ(forward->l_hat, 4u);
  EXPECT_EQ(backward->l_hat, 12u - forward->l_hat);
}

TEST(EstimateLV, InvariantToShiftAndScale) {
  const auto xs = gaussian_break(300, 900, 1.0, 2.0, 4);
  const auto base = sb::estimate_l_v(sb::TimeSeries(xs), {});
  ASSERT_TRUE(base.has_value());
  for (auto [a, c] : {std::pair{5.0, 2.0}, std::pair{-3.0, 0.5}}) {
    std::vector<double> ys;
    for (double x : xs) {
      ys.push_back(a + c * x);
    }
    const auto r = sb::estimate_l_v(sb::TimeSeries(ys), {});
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->l_hat, base->l_hat);
  }
}

TEST(EstimateLV, LinesMeetAtBreak) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = sb::estimate_l_v(sb::TimeSeries(gaussian_break(800, 1800, 2.0, 4.0, seed)), {});
    ASSERT_TRUE(r.has_value());
    const double l = static_cast<double>(r->l_hat);
    const auto& ln = r->lines;
    EXPECT_NEAR(ln.a1 + ln.b1 * l, ln.a2 + ln.b2 * l, 1e-8 * (1.0 + std::abs(ln.a1)));
    EXPECT_GE(r->l_hat, 1u);
    EXPECT_LE(r->l_hat, 1799u);
  }
}

TEST(EstimateLV, ShortInputRejected) {
  EXPECT_THROW(sb::estimate_l_v(sb::TimeSeries(two_level(4, 9, 1, 2)), {}), sb::InsufficientData);
}

TEST(FitHinge, RecoversCoefficients) {
  std::vector<double> v;
  for (int j = 1; j <= 10; ++j) {
    v.push_back(10.0 + 2.0 * std::max(0, j - 5) + 1.0 * std::max(0, 5 - j));
  }
  const auto fit = sb::fit_hinge(v, 5.0);
  EXPECT_NEAR(fit.beta0, 10.0, 1e-9);
  EXPECT_NEAR(fit.beta1, 2.0, 1e-9);
  EXPECT_NEAR(fit.beta2, 1.0, 1e-9);
  EXPECT_LT(fit.sse, 1e-18);
  const auto ln = fit.lines();
  for (int j = 1; j <= 10; ++j) {
    const double line = j <= 5 ? ln.a1 + ln.b1 * j : ln.a2 + ln.b2 * j;
    EXPECT_NEAR(line, v[j - 1], 1e-9);
  }
}

TEST(EstimateLC, ExactTwoLineStructure) {
  std::vector<double> c;
  double s = 0.0;
  for (double x : two_level(6, 12, 1.0, 2.0)) {
    s += x * x;
    c.push_back(s);
  }
  // The kink vertex C_6 lies on both lines, so splits 5 and 6 both fit exactly.
  const auto profile = sb::two_line_sse_profile(c);
  EXPECT_LT(profile[5 - 2], 1e-12);
  EXPECT_LT(profile[6 - 2], 1e-12);
  for (std::size_t k = 7; k <= 10; ++k) {
    EXPECT_GT(profile[k - 2], 1e-3);
  }
  const auto r = sb::estimate_l_c(sb::TimeSeries(two_level(6, 12, 1.0, 2.0)));
  EXPECT_EQ(r.l_hat, 5u);
  EXPECT_EQ(r.method, sb::BreakMethod::CTwoLine);
  EXPECT_NEAR(r.lines.b1, 1.0, 1e-9);
  EXPECT_NEAR(r.lines.b2, 4.0, 1e-9);
  EXPECT_LT(r.objective, 1e-12);
}

TEST(EstimateLC, DegenerateTieTakesSmallestSplit) {
  EXPECT_EQ(sb::estimate_l_c(sb::TimeSeries(two_level(0, 30, 2.0, 2.0))).l_hat, 2u);
}

TEST(EstimateLC, MatchesNaiveOracle) {
  sb::RandomStream rng(2024, 0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> xs;
    const double s2 = 0.5 + 2.0 * rng.uniform();
    for (int i = 0; i < 50; ++i) {
      xs.push_back(rng.normal() * (i < 20 ? 1.0 : s2));
    }
    EXPECT_EQ(sb::estimate_l_c(sb::TimeSeries(xs)).l_hat, naive_l_c(xs)) << "rep " << rep;
  }
}

TEST(EstimateLC, ProfileMatchesLength) {
  const auto xs = gaussian_break(20, 40, 1.0, 2.0, 3);
  std::vector<double> c;
  double s = 0.0;
  for (double x : xs) {
    s += x * x;
    c.push_back(s);
  }
  const auto profile = sb::two_line_sse_profile(c);
  ASSERT_EQ(profile.size(), 37u);
  const auto best = std::min_element(profile.begin(), profile.end()) - profile.begin();
  EXPECT_EQ(static_cast<std::size_t>(best) + 2, sb::estimate_l_c(sb::TimeSeries(xs)).l_hat);
}

TEST(EstimateLC, ScaleInvariantAndReversible) {
  // Exact data ties the kink vertex; the smaller split wins.
  auto xs = two_level(9, 30, 1.0, 2.0);
  EXPECT_EQ(sb::estimate_l_c(sb::TimeSeries(xs)).l_hat, 8u);
  std::reverse(xs.begin(), xs.end());
  EXPECT_EQ(sb::estimate_l_c(sb::TimeSeries(xs)).l_hat, 20u);
  const auto ys = gaussian_break(100, 300, 1.0, 3.0, 8);
  std::vector<double> scaled;
  for (double y : ys) {
    scaled.push_back(-7.0 * y);
  }
  EXPECT_EQ(sb::estimate_l_c(sb::TimeSeries(ys)).l_hat,
            sb::estimate_l_c(sb::TimeSeries(scaled)).l_hat);
}

TEST(EstimateLC, ShortInputRejected) {
  EXPECT_THROW(sb::estimate_l_c(sb::TimeSeries({1, 2, 3, 4, 5})), sb::InsufficientData);
  EXPECT_NO_THROW(sb::estimate_l_c(sb::TimeSeries({1, 2, 3, 4, 5, 6})));
}

TEST(SplitRanges, Bounds) {
  const auto [a, b] = sb::split_ranges(10, 4);
  EXPECT_EQ(a.first, 1u);
  EXPECT_EQ(a.last, 4u);
  EXPECT_EQ(b.first, 5u);
  EXPECT_EQ(b.last, 10u);
  EXPECT_THROW(sb::split_ranges(10, 0), sb::InvalidInput);
  EXPECT_THROW(sb::split_ranges(10, 10), sb::InvalidInput);
}

TEST(Segment, ShortInputRejected) {
  EXPECT_THROW(sb::segment(sb::TimeSeries({1, -1, 2, -2, 3}), 0.05, {}), sb::InsufficientData);
}

TEST(Segment, ReportsConsistentRanges) {
  const auto report =
      sb::segment(sb::TimeSeries(gaussian_break(800, 1800, 2.0, 4.0, 77)), 0.05, {});
  EXPECT_EQ(report.n, 1800u);
  ASSERT_TRUE(report.result_v && report.segments_v && report.test_v);
  EXPECT_EQ(report.segments_v->first.last, report.result_v->l_hat);
  EXPECT_EQ(report.segments_v->second.first, report.result_v->l_hat + 1);
  EXPECT_EQ(report.segments_c.first.last, report.result_c.l_hat);
  EXPECT_EQ(report.test_v->n_first, report.result_v->l_hat);
  EXPECT_EQ(report.test_v->n_second, 1800u - report.result_v->l_hat);
}

TEST(Segment, DetectsGaussianScaleBreak) {
  int rejects = 0;
  std::vector<std::size_t> l_hats;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto report =
        sb::segment(sb::TimeSeries(gaussian_break(800, 1800, 2.0, 4.0, 1000 + seed)), 0.05, {});
    if (report.test_v && report.test_v->p_value < 0.05) {
      ++rejects;
    }
    if (report.result_v) {
      l_hats.push_back(report.result_v->l_hat);
    }
  }
  EXPECT_GE(rejects, 95);
  ASSERT_FALSE(l_hats.empty());
  std::nth_element(l_hats.begin(), l_hats.begin() + l_hats.size() / 2, l_hats.end());
  const auto med = l_hats[l_hats.size() / 2];
  EXPECT_GE(med, 780u);
  EXPECT_LE(med, 820u);
}
