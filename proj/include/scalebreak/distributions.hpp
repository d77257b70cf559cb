#pragma once

// Gaussian and Levy-stable laws. Stable laws use the S1 parameterization
// S(alpha, beta, sigma, mu) with characteristic function
//
//   exp(-sigma^a |t|^a (1 - i beta sign(t) tan(pi a / 2)) + i mu t),   a != 1
//   exp(-sigma |t| (1 + i beta (2/pi) sign(t) ln|t|) + i mu t),        a == 1
//
// so alpha = 2 is the normal law with variance 2 sigma^2. Gaussian laws are
// written N(mu, sigma) with sigma the standard deviation.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "scalebreak/random.hpp"
#include "scalebreak/series.hpp"

namespace scalebreak {

struct StableParams {
  double alpha = 2.0;  // (0, 2]
  double beta = 0.0;   // [-1, 1]
  double sigma = 1.0;  // > 0
  double mu = 0.0;

  /// Throws InvalidInput when a parameter is out of range.
  void validate() const;
  /// Copy with beta zeroed when alpha == 2.
  StableParams normalized() const;

  friend bool operator==(const StableParams&, const StableParams&) = default;
};

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;

  friend bool operator==(const GaussianParams&, const GaussianParams&) = default;
};

TimeSeries sample_gaussian(double mu, double sigma, std::size_t n, RandomStream& rng);

/// Chambers-Mallows-Stuck draws.
TimeSeries sample_stable(const StableParams& params, std::size_t n, RandomStream& rng);
double draw_stable(const StableParams& params, RandomStream& rng);

/// Distribution function by numerical integration of the Nolan integral
/// representation (closed forms for alpha = 2 and for the symmetric Cauchy).
double stable_cdf(double x, const StableParams& params);

/// Cubic B-spline interpolant of stable_cdf on an asinh-spaced grid of the
/// standardized variable; direct evaluation outside the grid. Meant for
/// evaluating one law at many points.
class StableCdfTable {
 public:
  explicit StableCdfTable(const StableParams& params);
  ~StableCdfTable();
  StableCdfTable(StableCdfTable&&) noexcept;
  StableCdfTable& operator=(StableCdfTable&&) noexcept;

  double operator()(double x) const;
  const StableParams& params() const noexcept { return params_; }

 private:
  struct Spline;
  StableParams params_;
  double shift_ = 0.0;   // x = sigma z + shift
  double center_ = 0.0;  // grid center in z
  std::unique_ptr<Spline> spline_;
};

double normal_cdf(double x, const GaussianParams& params);

struct StableFit {
  StableParams params;
  int iterations = 0;
  bool converged = false;
};

/// Regression-type estimator on the empirical characteristic function,
/// iterated on re-standardized data. Needs n >= 200.
StableFit fit_stable_koutrouvelis(const TimeSeries& series);

/// Sample mean and standard deviation (n - 1 denominator).
GaussianParams fit_gaussian(const TimeSeries& series);

/// sup_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
template <typename Cdf>
double ks_statistic(std::span<const double> sample, Cdf&& cdf);

/// Anderson-Darling A^2; +inf when some F(x_(i)) is exactly 0 or 1.
template <typename Cdf>
double ad_statistic(std::span<const double> sample, Cdf&& cdf);

double ks_statistic_sorted(std::span<const double> sorted, std::span<const double> cdf_values);
double ad_statistic_sorted(std::span<const double> cdf_values);

enum class Family { Stable, Gaussian };

const char* to_string(Family family);

struct GofResult {
  Family family = Family::Stable;
  std::variant<StableParams, GaussianParams> fitted;
  double ks = 0.0;
  double ad = 0.0;
  double ks_p = 1.0;
  double ad_p = 1.0;
  int bootstrap_replicates = 0;
  bool fit_converged = true;
};

/// Parametric bootstrap: the fitted law generates `replicates` samples of
/// the same size, each refitted and scored. p = (1 + #{stat_b >= stat}) / (B + 1).
/// Replicate b draws from rng.substream(b).
GofResult bootstrap_gof_pvalue(const TimeSeries& series, Family family, int replicates,
                               const RandomStream& rng);

// ---------------------------------------------------------------------------

template <typename Cdf>
double ks_statistic(std::span<const double> sample, Cdf&& cdf) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> f(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    f[i] = cdf(sorted[i]);
  }
  return ks_statistic_sorted(sorted, f);
}

template <typename Cdf>
double ad_statistic(std::span<const double> sample, Cdf&& cdf) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> f(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    f[i] = cdf(sorted[i]);
  }
  return ad_statistic_sorted(f);
}

}  // namespace scalebreak
