#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "scalebreak/distributions.hpp"
#include "scalebreak/errors.hpp"
#include "scalebreak/hypothesis.hpp"

namespace scalebreak {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMinFitLength = 200;
constexpr int kMaxIterations = 10;
constexpr double kTolerance = 1e-4;

// Number of frequencies for the two regressions, indexed by the current
// alpha estimate and the sample size (nearest row and column).
constexpr std::array<double, 8> kAlphaRows = {1.9, 1.5, 1.3, 1.1, 0.9, 0.7, 0.5, 0.3};
constexpr std::array<double, 3> kSizeCols = {200, 800, 1600};
constexpr int kFrequencyTableK[8][3] = {
    {9, 9, 9},     {11, 11, 11}, {22, 16, 14}, {24, 18, 15},
    {28, 22, 18},  {30, 24, 20}, {86, 68, 56}, {134, 124, 118},
};
constexpr int kFrequencyTableL[8][3] = {
    {9, 10, 11},  {12, 14, 15}, {16, 18, 17}, {14, 14, 14},
    {24, 16, 16}, {40, 38, 36}, {70, 68, 66}, {70, 68, 66},
};
constexpr int kFallbackCount = 10;

std::size_t nearest(const double* grid, std::size_t size, double v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < size; ++i) {
    if (std::abs(grid[i] - v) < std::abs(grid[best] - v)) {
      best = i;
    }
  }
  return best;
}

std::pair<int, int> frequency_counts(double alpha, std::size_t n) {
  if (!(alpha >= kAlphaRows.back() && alpha <= 2.0)) {
    return {kFallbackCount, kFallbackCount};
  }
  const std::size_t row = nearest(kAlphaRows.data(), kAlphaRows.size(), alpha);
  const std::size_t col = nearest(kSizeCols.data(), kSizeCols.size(), static_cast<double>(n));
  return {kFrequencyTableK[row][col], kFrequencyTableL[row][col]};
}

std::complex<double> ecf(std::span<const double> y, double t) {
  double re = 0.0;
  double im = 0.0;
  for (double v : y) {
    re += std::cos(t * v);
    im += std::sin(t * v);
  }
  const auto n = static_cast<double>(y.size());
  return {re / n, im / n};
}

struct Line {
  double intercept;
  double slope;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

// One pass of both regressions on data standardized by the current
// (sigma, mu). Returns the standardized-scale estimates.
struct StepEstimate {
  double alpha;
  double beta;
  double scale;     // multiplies the current sigma
  double location;  // in units of the current sigma
};

StepEstimate regress(std::span<const double> y, double alpha_hint) {
  const auto [k_count, l_count] = frequency_counts(alpha_hint, y.size());

  std::vector<double> log_t;
  std::vector<double> log_log;
  for (int k = 1; k <= k_count; ++k) {
    const double t = kPi * k / 25.0;
    const double mod2 = std::norm(ecf(y, t));
    if (mod2 > 0.0 && mod2 < 1.0) {
      log_t.push_back(std::log(t));
      log_log.push_back(std::log(-std::log(mod2)));
    }
  }
  if (log_t.size() < 3) {
    throw NumericalFailure("characteristic-function regression has too few usable frequencies");
  }
  const Line first = ols(log_t, log_log);
  const double alpha = std::clamp(first.slope, 0.1, 2.0);
  const double scale = std::pow(std::exp(first.intercept) / 2.0, 1.0 / alpha);

  // Phase regression: arg phi(u) = mu u + beta sigma^a tan(pi a / 2) u^a.
  std::vector<double> u_values;
  std::vector<double> phases;
  double previous = 0.0;
  for (int l = 1; l <= l_count; ++l) {
    const double u = kPi * l / 50.0;
    const std::complex<double> phi = ecf(y, u);
    double phase = std::arg(phi);
    while (phase - previous > kPi) {
      phase -= 2.0 * kPi;
    }
    while (phase - previous < -kPi) {
      phase += 2.0 * kPi;
    }
    previous = phase;
    u_values.push_back(u);
    phases.push_back(phase);
  }
  const double skew_factor = std::pow(scale, alpha) * std::tan(kPi * alpha / 2.0);
  double beta = 0.0;
  double location = 0.0;
  if (alpha >= 2.0 || std::abs(skew_factor) < 1e-12) {
    double suu = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < u_values.size(); ++i) {
      suu += u_values[i] * u_values[i];
      sup += u_values[i] * phases[i];
    }
    location = sup / suu;
  } else {
    // No-intercept regression on the columns u and skew_factor * u^alpha.
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t i = 0; i < u_values.size(); ++i) {
      const double c1 = u_values[i];
      const double c2 = skew_factor * std::pow(u_values[i], alpha);
      a11 += c1 * c1;
      a12 += c1 * c2;
      a22 += c2 * c2;
      b1 += c1 * phases[i];
      b2 += c2 * phases[i];
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) > 1e-14 * a11 * a22) {
      location = (a22 * b1 - a12 * b2) / det;
      beta = (a11 * b2 - a12 * b1) / det;
    } else {
      location = b1 / a11;
    }
  }
  return {alpha, std::clamp(beta, -1.0, 1.0), scale, location};
}

}  // namespace

StableFit fit_stable_koutrouvelis(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < kMinFitLength) {
    throw InsufficientData("insufficient data: stable fitting needs at least " +
                           std::to_string(kMinFitLength) + " observations, got " +
                           std::to_string(n));
  }
  std::vector<double> sorted(series.values().begin(), series.values().end());
  std::sort(sorted.begin(), sorted.end());

  // Quantile starting values: the 0.28-0.72 spread is close to 1.654 sigma
  // across the whole alpha range.
  double sigma = (empirical_quantile(sorted, 0.72) - empirical_quantile(sorted, 0.28)) / 1.654;
  if (!(sigma > 0.0)) {
    sigma = (sorted.back() - sorted.front()) / 2.0;
  }
  if (!(sigma > 0.0)) {
    throw NumericalFailure("stable fit of a constant sample");
  }
  double mu = empirical_quantile(sorted, 0.5);
  double alpha = 0.0;  // outside the table: first pass uses the fallback counts
  double beta = 0.0;

  std::vector<double> y(n);
  StableFit fit;
  for (int it = 1; it <= kMaxIterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = (series[i] - mu) / sigma;
    }
    const StepEstimate step = regress(y, alpha);
    const double new_sigma = sigma * step.scale;
    const double new_mu = mu + sigma * step.location;
    const double change =
        std::max({std::abs(step.alpha - alpha), std::abs(step.beta - beta),
                  std::abs(new_sigma - sigma) / sigma, std::abs(new_mu - mu) / sigma});
    alpha = step.alpha;
    beta = step.beta;
    sigma = new_sigma;
    mu = new_mu;
    fit.iterations = it;
    if (!std::isfinite(sigma) || !(sigma > 0.0) || !std::isfinite(mu)) {
      throw NumericalFailure("stable fit diverged");
    }
    if (change < kTolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.params = StableParams{std::clamp(alpha, 0.1, 2.0), std::clamp(beta, -1.0, 1.0), sigma, mu}
                   .normalized();
  return fit;
}

GaussianParams fit_gaussian(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < 2) {
    throw InsufficientData("insufficient data: Gaussian fitting needs at least 2 observations");
  }
  long double mean = 0.0L;
  for (double x : series.values()) {
    mean += x;
  }
  mean /= static_cast<long double>(n);
  long double ss = 0.0L;
  for (double x : series.values()) {
    ss += (x - mean) * (x - mean);
  }
  const double sd = std::sqrt(static_cast<double>(ss / static_cast<long double>(n - 1)));
  if (!(sd > 0.0)) {
    throw NumericalFailure("Gaussian fit of a constant sample");
  }
  return {static_cast<double>(mean), sd};
}

}  // namespace scalebreak
