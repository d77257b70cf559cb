#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "parallel.hpp"
#include "scalebreak/distributions.hpp"
#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

constexpr int kMinReplicates = 100;

struct Scores {
  double ks = 0.0;
  double ad = 0.0;
};

template <typename Cdf>
Scores score_sorted(const std::vector<double>& sorted, const Cdf& cdf) {
  std::vector<double> f(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    f[i] = cdf(sorted[i]);
  }
  return {ks_statistic_sorted(sorted, f), ad_statistic_sorted(f)};
}

struct FittedScores {
  std::variant<StableParams, GaussianParams> params;
  Scores scores;
  bool converged = true;
};

FittedScores fit_and_score(const TimeSeries& series, Family family) {
  std::vector<double> sorted(series.values().begin(), series.values().end());
  std::sort(sorted.begin(), sorted.end());
  FittedScores out;
  if (family == Family::Gaussian) {
    const GaussianParams g = fit_gaussian(series);
    out.params = g;
    out.scores = score_sorted(sorted, [&](double x) { return normal_cdf(x, g); });
  } else {
    const StableFit fit = fit_stable_koutrouvelis(series);
    const StableCdfTable table(fit.params);
    out.params = fit.params;
    out.converged = fit.converged;
    out.scores = score_sorted(sorted, table);
  }
  return out;
}

}  // namespace

double ks_statistic_sorted(std::span<const double> sorted, std::span<const double> cdf_values) {
  const std::size_t n = sorted.size();
  if (n == 0 || cdf_values.size() != n) {
    throw InvalidInput("KS statistic needs a nonempty sample with one CDF value per point");
  }
  const auto nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf_values[i];
    d = std::max({d, static_cast<double>(i + 1) / nd - f, f - static_cast<double>(i) / nd});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ad_statistic_sorted(std::span<const double> cdf_values) {
  const std::size_t n = cdf_values.size();
  if (n == 0) {
    throw InvalidInput("AD statistic needs a nonempty sample");
  }
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = cdf_values[i];
    const double hi = cdf_values[n - 1 - i];
    if (!(lo > 0.0 && lo < 1.0 && hi > 0.0 && hi < 1.0)) {
      return std::numeric_limits<double>::infinity();
    }
    sum += static_cast<long double>(2 * i + 1) * (std::log(lo) + std::log1p(-hi));
  }
  const auto nd = static_cast<long double>(n);
  return static_cast<double>(-nd - sum / nd);
}

GofResult bootstrap_gof_pvalue(const TimeSeries& series, Family family, int replicates,
                               const RandomStream& rng) {
  if (replicates < kMinReplicates) {
    throw InvalidInput("bootstrap needs at least " + std::to_string(kMinReplicates) +
                       " replicates");
  }
  const FittedScores observed = fit_and_score(series, family);
  const std::size_t n = series.size();

  // A replicate whose refit breaks down is counted as at least as extreme
  // as the observed sample, which can only raise the p-value.
  std::vector<Scores> boot(static_cast<std::size_t>(replicates));
  detail::parallel_for(boot.size(), [&](std::size_t b) {
    RandomStream stream = rng.substream(b);
    try {
      const TimeSeries draw =
          family == Family::Gaussian
              ? sample_gaussian(std::get<GaussianParams>(observed.params).mu,
                                std::get<GaussianParams>(observed.params).sigma, n, stream)
              : sample_stable(std::get<StableParams>(observed.params), n, stream);
      boot[b] = fit_and_score(draw, family).scores;
    } catch (const NumericalFailure&) {
      boot[b] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
  });

  std::size_t ks_exceed = 0;
  std::size_t ad_exceed = 0;
  for (const Scores& s : boot) {
    ks_exceed += s.ks >= observed.scores.ks ? 1 : 0;
    ad_exceed += s.ad >= observed.scores.ad ? 1 : 0;
  }
  GofResult out;
  out.family = family;
  out.fitted = observed.params;
  out.ks = observed.scores.ks;
  out.ad = observed.scores.ad;
  out.ks_p = static_cast<double>(1 + ks_exceed) / static_cast<double>(replicates + 1);
  out.ad_p = static_cast<double>(1 + ad_exceed) / static_cast<double>(replicates + 1);
  out.bootstrap_replicates = replicates;
  out.fit_converged = observed.converged;
  return out;
}

}  // namespace scalebreak
