#include "scalebreak/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "linalg.hpp"
#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

constexpr std::size_t kMinVLength = 10;
constexpr std::size_t kMinCLength = 6;
// Objective values within this fraction of the data's total sum of squares
// count as ties.
constexpr double kTieFraction = 1e-11;

// Streaming simple regression of y on x (Welford co-moment updates).
class RunningLine {
 public:
  void add(double x, double y) {
    count_ += 1.0;
    const double dx = x - mean_x_;
    mean_x_ += dx / count_;
    const double dy = y - mean_y_;
    mean_y_ += dy / count_;
    sxx_ += dx * (x - mean_x_);
    sxy_ += dx * (y - mean_y_);
    syy_ += dy * (y - mean_y_);
  }

  double sse() const {
    if (!(sxx_ > 0.0)) {
      return syy_;
    }
    return std::max(0.0, syy_ - sxy_ * sxy_ / sxx_);
  }

  double syy() const { return syy_; }

 private:
  double count_ = 0.0;
  double mean_x_ = 0.0;
  double mean_y_ = 0.0;
  double sxx_ = 0.0;
  double sxy_ = 0.0;
  double syy_ = 0.0;
};

// OLS line through (j, values[j-1]) for j in [first, last], two-pass.
std::pair<double, double> ols_line(std::span<const double> values, std::size_t first,
                                   std::size_t last) {
  const auto count = static_cast<double>(last - first + 1);
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t j = first; j <= last; ++j) {
    mean_x += static_cast<double>(j);
    mean_y += values[j - 1];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t j = first; j <= last; ++j) {
    const double dx = static_cast<double>(j) - mean_x;
    sxx += dx * dx;
    sxy += dx * (values[j - 1] - mean_y);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {mean_y - slope * mean_x, slope};
}

double total_sum_squares(std::span<const double> values) {
  RunningLine all;
  for (std::size_t j = 0; j < values.size(); ++j) {
    all.add(static_cast<double>(j + 1), values[j]);
  }
  return all.syy();
}

}  // namespace

const char* to_string(BreakMethod method) {
  return method == BreakMethod::VMars ? "V_MARS" : "C_TWOLINE";
}

SegmentLines HingeFit::lines() const {
  return {beta0 + beta2 * knot, -beta2, beta0 - beta1 * knot, beta1};
}

HingeFit fit_hinge(std::span<const double> values, double knot) {
  const auto n = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXd design(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<double>(i + 1);
    design(i, 0) = 1.0;
    design(i, 1) = std::max(0.0, j - knot);
    design(i, 2) = std::max(0.0, knot - j);
  }
  const auto fit =
      detail::least_squares(design, Eigen::Map<const Eigen::VectorXd>(values.data(), n));
  return {knot, fit.coef(0), fit.coef(1), fit.coef(2), fit.rss};
}

std::optional<ChangePointResult> estimate_l_v(const TimeSeries& series, const MarsConfig& config) {
  const std::size_t n = series.size();
  if (n < kMinVLength) {
    throw InsufficientData("insufficient data: the V estimator needs at least " +
                           std::to_string(kMinVLength) + " observations, got " +
                           std::to_string(n));
  }
  const CumulativeStat v = v_statistics(series);
  std::vector<double> index(n);
  for (std::size_t j = 0; j < n; ++j) {
    index[j] = static_cast<double>(j + 1);
  }
  MarsModel model = fit_mars(index, v.values, config);
  // A knot at either end only spans a linear term; it leaves no regime on
  // one side.
  std::vector<double> knots;
  for (double knot : model.knots()) {
    if (knot > 1.0 && knot < static_cast<double>(n)) {
      knots.push_back(knot);
    }
  }
  if (knots.empty()) {
    return std::nullopt;
  }

  const double tie = kTieFraction * total_sum_squares(v.values);
  std::optional<HingeFit> best;
  for (double knot : knots) {
    HingeFit fit = fit_hinge(v.values, knot);
    if (!best || fit.sse < best->sse - tie) {
      best = fit;
    }
  }
  const auto rounded = static_cast<std::size_t>(std::max(0.0, std::floor(best->knot + 0.5)));
  const std::size_t l_hat = std::clamp<std::size_t>(rounded, 1, n - 1);

  ChangePointResult result;
  result.method = BreakMethod::VMars;
  result.l_hat = l_hat;
  result.hinge = fit_hinge(v.values, static_cast<double>(l_hat));
  result.lines = result.hinge->lines();
  result.objective = model.gcv;
  result.mars = std::move(model);
  return result;
}

std::vector<double> two_line_sse_profile(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < kMinCLength) {
    throw InsufficientData("insufficient data: the C estimator needs at least " +
                           std::to_string(kMinCLength) + " observations, got " +
                           std::to_string(n));
  }
  // prefix[k]: SSE of the line through points 1..k; suffix[k]: points k..n.
  std::vector<double> prefix(n + 1, 0.0);
  std::vector<double> suffix(n + 2, 0.0);
  RunningLine head;
  for (std::size_t k = 1; k <= n; ++k) {
    head.add(static_cast<double>(k), values[k - 1]);
    prefix[k] = head.sse();
  }
  RunningLine tail;
  for (std::size_t k = n; k >= 1; --k) {
    tail.add(static_cast<double>(k), values[k - 1]);
    suffix[k] = tail.sse();
  }
  std::vector<double> profile;
  profile.reserve(n - 3);
  for (std::size_t k = 2; k + 2 <= n; ++k) {
    profile.push_back(prefix[k] + suffix[k + 1]);
  }
  return profile;
}

ChangePointResult estimate_l_c(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < kMinCLength) {
    throw InsufficientData("insufficient data: the C estimator needs at least " +
                           std::to_string(kMinCLength) + " observations, got " +
                           std::to_string(n));
  }
  const CumulativeStat c = c_statistics(series);
  const std::vector<double> profile = two_line_sse_profile(c.values);
  const double lowest = *std::min_element(profile.begin(), profile.end());
  const double tie = kTieFraction * total_sum_squares(c.values);
  std::size_t pos = 0;
  while (profile[pos] > lowest + tie) {
    ++pos;
  }
  const std::size_t l_hat = pos + 2;

  ChangePointResult result;
  result.method = BreakMethod::CTwoLine;
  result.l_hat = l_hat;
  const auto [a1, b1] = ols_line(c.values, 1, l_hat);
  const auto [a2, b2] = ols_line(c.values, l_hat + 1, n);
  result.lines = {a1, b1, a2, b2};
  result.objective = profile[pos];
  return result;
}

SegmentPair split_ranges(std::size_t n, std::size_t l) {
  if (l < 1 || l >= n) {
    throw InvalidInput("split index must leave both segments nonempty");
  }
  return {IndexRange{1, l}, IndexRange{l + 1, n}};
}

SegmentationReport segment(const TimeSeries& series, double alpha, const MarsConfig& config) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("significance level must lie in (0, 1)");
  }
  SegmentationReport report;
  report.n = series.size();
  report.alpha = alpha;
  report.result_v = estimate_l_v(series, config);
  report.result_c = estimate_l_c(series);

  const auto values = series.values();
  if (report.result_v) {
    const std::size_t l = report.result_v->l_hat;
    report.test_v = ansari_bradley(values.first(l), values.subspan(l), alpha);
    report.segments_v = split_ranges(series.size(), l);
  }
  report.test_c = quantile_binomial_test(series, report.result_c.l_hat, alpha);
  report.segments_c = split_ranges(series.size(), report.result_c.l_hat);
  return report;
}

}  // namespace scalebreak
