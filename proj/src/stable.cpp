#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "scalebreak/distributions.hpp"
#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

bool is_cauchy_symmetric(const StableParams& p) { return p.alpha == 1.0 && p.beta == 0.0; }

double shift_of(const StableParams& p) {
  if (p.alpha == 1.0) {
    return p.mu + 2.0 / kPi * p.beta * p.sigma * std::log(p.sigma);
  }
  return p.mu;
}

// Standardized coordinate of x (the integral representation's x - zeta
// with unit scale).
double standardize(double x, const StableParams& p) { return (x - shift_of(p)) / p.sigma; }

double safe_log(double v) {
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

// Integrates exp(-exp(log_g(theta))) over [lo, hi], where log_g is monotone
// and crosses zero at most once. The integrand drops from ~1 to ~0 around
// that crossing, so the interval is split there.
template <typename LogG>
double integrate_exp_exp(LogG&& log_g, double lo, double hi) {
  if (!(hi > lo)) {
    return 0.0;
  }
  auto integrand = [&](double theta) {
    const double lg = log_g(theta);
    if (std::isnan(lg)) {
      return 0.0;
    }
    if (lg > 700.0) {
      return 0.0;
    }
    return std::exp(-std::exp(lg));
  };

  const double eps = 1e-14 * (hi - lo);
  const double g_lo = log_g(lo + eps);
  const double g_hi = log_g(hi - eps);
  const bool increasing = !(g_lo > g_hi);
  double a = lo;
  double b = hi;
  double mid = 0.5 * (lo + hi);
  if ((increasing && g_lo < 0.0 && g_hi > 0.0) || (!increasing && g_lo > 0.0 && g_hi < 0.0)) {
    for (int it = 0; it < 200 && b - a > 1e-15 * (hi - lo); ++it) {
      mid = 0.5 * (a + b);
      const double g = log_g(mid);
      if ((g < 0.0) == increasing) {
        a = mid;
      } else {
        b = mid;
      }
    }
    mid = 0.5 * (a + b);
  }

  // Double-exponential clustering at the endpoints resolves the transition
  // next to the split even when it is many orders narrower than the interval.
  thread_local boost::math::quadrature::tanh_sinh<double> quad;
  constexpr double kTol = 1e-10;
  double total = 0.0;
  if (mid > lo) {
    total += quad.integrate(integrand, lo, mid, kTol);
  }
  if (hi > mid) {
    total += quad.integrate(integrand, mid, hi, kTol);
  }
  return total;
}

// F(z) for z > 0 in the standardized coordinates, alpha != 1.
double cdf_positive(double z, double alpha, double beta) {
  const double theta0 = std::atan(beta * std::tan(kHalfPi * alpha)) / alpha;
  const double lead = (kHalfPi - theta0) / kPi;
  if (z == 0.0) {
    return lead;
  }
  const double am1 = alpha - 1.0;
  const double c_log = std::log(std::cos(alpha * theta0)) / am1;
  const double power = alpha / am1;
  const double log_z = std::log(z);
  auto log_g = [&](double theta) {
    const double cos_t = std::cos(theta);
    return power * log_z + c_log + power * (safe_log(cos_t) - safe_log(std::sin(alpha * (theta0 + theta)))) +
           safe_log(std::cos(alpha * theta0 + am1 * theta)) - safe_log(cos_t);
  };
  const double integral = integrate_exp_exp(log_g, -theta0, kHalfPi);
  if (alpha < 1.0) {
    return lead + integral / kPi;
  }
  return 1.0 - integral / kPi;
}

double cdf_standard(double z, double alpha, double beta) {
  if (z < 0.0) {
    return 1.0 - cdf_positive(-z, alpha, -beta);
  }
  return cdf_positive(z, alpha, beta);
}

// alpha == 1, beta > 0.
double cdf_alpha_one_positive_beta(double z, double beta) {
  const double shift = -kPi * z / (2.0 * beta) + std::log(2.0 / kPi);
  auto log_g = [&](double theta) {
    const double a = kHalfPi + beta * theta;
    return shift + safe_log(a) - safe_log(std::cos(theta)) + a * std::tan(theta) / beta;
  };
  return integrate_exp_exp(log_g, -kHalfPi, kHalfPi) / kPi;
}

double cdf_alpha_one(double z, double beta) {
  if (beta == 0.0) {
    return 0.5 + std::atan(z) / kPi;
  }
  if (beta < 0.0) {
    return 1.0 - cdf_alpha_one_positive_beta(-z, -beta);
  }
  return cdf_alpha_one_positive_beta(z, beta);
}

double cdf_of_standardized(double z, const StableParams& p) {
  double f = 0.0;
  if (p.alpha == 2.0) {
    f = 0.5 * std::erfc(-z / 2.0);
  } else if (p.alpha == 1.0) {
    f = cdf_alpha_one(z, p.beta);
  } else {
    f = cdf_standard(z, p.alpha, p.beta);
  }
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw InvalidInput("stable alpha must lie in (0, 2]");
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw InvalidInput("stable beta must lie in [-1, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidInput("stable scale must be positive");
  }
  if (!std::isfinite(mu)) {
    throw InvalidInput("stable location must be finite");
  }
}

StableParams StableParams::normalized() const {
  StableParams out = *this;
  if (out.alpha == 2.0) {
    out.beta = 0.0;
  }
  return out;
}

const char* to_string(Family family) { return family == Family::Stable ? "stable" : "gaussian"; }

TimeSeries sample_gaussian(double mu, double sigma, std::size_t n, RandomStream& rng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw InvalidInput("Gaussian standard deviation must be positive");
  }
  std::vector<double> out(n);
  for (auto& x : out) {
    x = mu + sigma * rng.normal();
  }
  return TimeSeries(std::move(out));
}

double draw_stable(const StableParams& params, RandomStream& rng) {
  const StableParams p = params.normalized();
  if (p.alpha == 2.0) {
    return p.mu + p.sigma * std::numbers::sqrt2 * rng.normal();
  }
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (p.alpha == 1.0) {
    const double a = kHalfPi + p.beta * v;
    const double x =
        2.0 / kPi * (a * std::tan(v) - p.beta * std::log(kHalfPi * w * std::cos(v) / a));
    return p.sigma * x + 2.0 / kPi * p.beta * p.sigma * std::log(p.sigma) + p.mu;
  }
  const double t = p.beta * std::tan(kHalfPi * p.alpha);
  const double b = std::atan(t) / p.alpha;
  const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * p.alpha));
  const double x = s * std::sin(p.alpha * (v + b)) / std::pow(std::cos(v), 1.0 / p.alpha) *
                   std::pow(std::cos(v - p.alpha * (v + b)) / w, (1.0 - p.alpha) / p.alpha);
  return p.sigma * x + p.mu;
}

TimeSeries sample_stable(const StableParams& params, std::size_t n, RandomStream& rng) {
  params.validate();
  std::vector<double> out(n);
  for (auto& x : out) {
    x = draw_stable(params, rng);
  }
  return TimeSeries(std::move(out));
}

double stable_cdf(double x, const StableParams& params) {
  params.validate();
  const StableParams p = params.normalized();
  if (std::isnan(x)) {
    throw InvalidInput("stable_cdf argument is NaN");
  }
  if (x == std::numeric_limits<double>::infinity()) {
    return 1.0;
  }
  if (x == -std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  if (is_cauchy_symmetric(p)) {
    return 0.5 + std::atan((x - p.mu) / p.sigma) / kPi;
  }
  return cdf_of_standardized(standardize(x, p), p);
}

double normal_cdf(double x, const GaussianParams& params) {
  return 0.5 * std::erfc(-(x - params.mu) / (params.sigma * std::numbers::sqrt2));
}

// Grid in u = asinh(z - center): dense near the center, reaching ~1490 scale
// units out at the ends. The center is the mode-bearing location
// beta tan(pi alpha / 2), which drifts far from zero as alpha nears 1.
struct StableCdfTable::Spline {
  static constexpr double kHalfWidth = 8.0;
  static constexpr double kStep = 0.05;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

StableCdfTable::StableCdfTable(const StableParams& params) : params_(params.normalized()) {
  params_.validate();
  shift_ = shift_of(params_);
  if (params_.alpha != 1.0) {
    center_ = params_.beta * std::tan(kHalfPi * params_.alpha);
  }
  if (params_.alpha == 2.0 || is_cauchy_symmetric(params_)) {
    return;
  }
  const int count = static_cast<int>(std::lround(2.0 * Spline::kHalfWidth / Spline::kStep)) + 1;
  std::vector<double> values(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double u = -Spline::kHalfWidth + Spline::kStep * i;
    values[static_cast<std::size_t>(i)] = cdf_of_standardized(center_ + std::sinh(u), params_);
  }
  spline_ = std::make_unique<Spline>(Spline{boost::math::interpolators::cardinal_cubic_b_spline<double>(
      values.begin(), values.end(), -Spline::kHalfWidth, Spline::kStep)});
}

StableCdfTable::~StableCdfTable() = default;
StableCdfTable::StableCdfTable(StableCdfTable&&) noexcept = default;
StableCdfTable& StableCdfTable::operator=(StableCdfTable&&) noexcept = default;

double StableCdfTable::operator()(double x) const {
  if (!spline_) {
    return stable_cdf(x, params_);
  }
  const double z = (x - shift_) / params_.sigma;
  const double u = std::asinh(z - center_);
  if (std::abs(u) >= Spline::kHalfWidth) {
    return cdf_of_standardized(z, params_);
  }
  return std::clamp(spline_->spline(u), 0.0, 1.0);
}

}  // namespace scalebreak
