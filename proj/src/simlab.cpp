#include "scalebreak/simlab.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "scalebreak/changepoint.hpp"
#include "scalebreak/errors.hpp"
#include "scalebreak/hypothesis.hpp"

namespace scalebreak {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::optional<std::size_t> rounded_mean(const std::vector<std::optional<std::size_t>>& samples,
                                        std::size_t lo, std::size_t hi) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (s) {
      sum += static_cast<double>(*s);
      ++count;
    }
  }
  if (count == 0) {
    return std::nullopt;
  }
  const auto mean = static_cast<std::size_t>(std::floor(sum / static_cast<double>(count) + 0.5));
  return std::clamp(mean, lo, hi);
}

}  // namespace

SegmentGenerator SegmentGenerator::normal(double mu, double sigma, std::size_t length) {
  SegmentGenerator g;
  g.family = Family::Gaussian;
  g.gaussian = {mu, sigma};
  g.length = length;
  return g;
}

SegmentGenerator SegmentGenerator::levy_stable(StableParams params, std::size_t length) {
  SegmentGenerator g;
  g.family = Family::Stable;
  g.stable = params;
  g.length = length;
  return g;
}

TimeSeries SegmentGenerator::draw(RandomStream& rng) const {
  if (family == Family::Gaussian) {
    return sample_gaussian(gaussian.mu, gaussian.sigma, length, rng);
  }
  return sample_stable(stable, length, rng);
}

std::string SegmentGenerator::label() const {
  if (family == Family::Gaussian) {
    return "N(" + format_number(gaussian.mu) + "," + format_number(gaussian.sigma) + ")";
  }
  return "S(" + format_number(stable.alpha) + "," + format_number(stable.beta) + "," +
         format_number(stable.sigma) + "," + format_number(stable.mu) + ")";
}

void ScenarioSpec::validate() const {
  if (first_segment.length == 0 || second_segment.length == 0) {
    throw InvalidInput("scenario segments must have positive length");
  }
  if (n_trials == 0) {
    throw InvalidInput("scenario needs at least one trial");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("significance level must lie in (0, 1)");
  }
  for (const SegmentGenerator* g : {&first_segment, &second_segment}) {
    if (g->family == Family::Gaussian) {
      if (!(g->gaussian.sigma > 0.0) || !std::isfinite(g->gaussian.sigma) ||
          !std::isfinite(g->gaussian.mu)) {
        throw InvalidInput("Gaussian standard deviation must be positive");
      }
    } else {
      g->stable.validate();
    }
  }
  if (true_l && (*true_l < 1 || *true_l >= length())) {
    throw InvalidInput("true break must leave both segments nonempty");
  }
  mars.validate();
}

TimeSeries generate_series(const ScenarioSpec& spec, std::size_t trial) {
  RandomStream rng = RandomStream(spec.seed, 0).substream(trial);
  const TimeSeries head = spec.first_segment.draw(rng);
  const TimeSeries tail = spec.second_segment.draw(rng);
  std::vector<double> values;
  values.reserve(head.size() + tail.size());
  values.insert(values.end(), head.data().begin(), head.data().end());
  values.insert(values.end(), tail.data().begin(), tail.data().end());
  if (spec.permute) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[rng.below(i)]);
    }
  }
  return TimeSeries(std::move(values));
}

ScenarioReport run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t trials = spec.n_trials;
  const std::size_t n = spec.length();

  ScenarioReport report;
  report.spec = spec;
  report.l_hat_v_samples.assign(trials, std::nullopt);
  report.l_hat_c_samples.assign(trials, std::nullopt);
  report.p_value_v_samples.assign(trials, kNaN);
  report.p_value_c_samples.assign(trials, kNaN);
  report.per_trial_p_value_v.assign(trials, kNaN);
  report.per_trial_p_value_c.assign(trials, kNaN);
  report.trial_errors.assign(trials, std::string());
  std::vector<char> v_failed(trials, 0);

  // Pass 1: estimates, and the tests at each trial's own estimate.
  detail::parallel_for(trials, [&](std::size_t t) {
    const TimeSeries series = generate_series(spec, t);
    const auto values = series.values();
    try {
      const auto v = estimate_l_v(series, spec.mars);
      if (v) {
        report.l_hat_v_samples[t] = v->l_hat;
        report.per_trial_p_value_v[t] =
            ansari_bradley(values.first(v->l_hat), values.subspan(v->l_hat), spec.alpha).p_value;
      }
    } catch (const Error& e) {
      v_failed[t] = 1;
      report.trial_errors[t] = std::string("V: ") + e.what();
    }
    try {
      const ChangePointResult c = estimate_l_c(series);
      report.l_hat_c_samples[t] = c.l_hat;
      report.per_trial_p_value_c[t] =
          quantile_binomial_test(series, c.l_hat, spec.alpha).p_value;
    } catch (const Error& e) {
      report.trial_errors[t] += std::string(report.trial_errors[t].empty() ? "" : "; ") +
                                "C: " + e.what();
    }
  });

  // Pass 2: both tests at the averaged estimates.
  report.mean_split_v = rounded_mean(report.l_hat_v_samples, 1, n - 1);
  report.mean_split_c = rounded_mean(report.l_hat_c_samples, 2, n - 2);
  if (report.mean_split_v || report.mean_split_c) {
    detail::parallel_for(trials, [&](std::size_t t) {
      const TimeSeries series = generate_series(spec, t);
      const auto values = series.values();
      if (report.mean_split_v && !v_failed[t]) {
        const std::size_t l = *report.mean_split_v;
        report.p_value_v_samples[t] =
            ansari_bradley(values.first(l), values.subspan(l), spec.alpha).p_value;
      }
      if (report.mean_split_c && report.l_hat_c_samples[t]) {
        report.p_value_c_samples[t] =
            quantile_binomial_test(series, *report.mean_split_c, spec.alpha).p_value;
      }
    });
  }

  for (std::size_t t = 0; t < trials; ++t) {
    if (!report.trial_errors[t].empty()) {
      ++report.failed_trials;
    } else if (!report.l_hat_v_samples[t]) {
      ++report.no_break_v;
    }
    auto tally = [&](double p, std::size_t& tested, std::size_t& rejected) {
      if (!std::isnan(p)) {
        ++tested;
        rejected += p <= spec.alpha ? 1 : 0;
      }
    };
    std::size_t ignored = 0;
    tally(report.p_value_v_samples[t], report.tested_trials.kwz_v, report.reject_counts.kwz_v);
    tally(report.p_value_c_samples[t], report.tested_trials.gsw_c, report.reject_counts.gsw_c);
    tally(report.per_trial_p_value_v[t], ignored, report.per_trial_reject_counts.kwz_v);
    tally(report.per_trial_p_value_c[t], ignored, report.per_trial_reject_counts.gsw_c);
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ErrorTable error_summary(const std::vector<ScenarioReport>& reports, ErrorKind kind) {
  if (reports.empty()) {
    throw InvalidInput("error summary needs at least one scenario report");
  }
  ErrorTable table;
  table.kind = kind;
  for (const ScenarioReport& r : reports) {
    ErrorRow row;
    row.scenario = r.spec.name;
    row.n_trials = r.spec.n_trials;
    if (kind == ErrorKind::TypeI) {
      row.gsw_c = r.reject_counts.gsw_c;
      row.kwz_v = r.reject_counts.kwz_v;
    } else {
      row.gsw_c = r.tested_trials.gsw_c - r.reject_counts.gsw_c;
      row.kwz_v = r.tested_trials.kwz_v - r.reject_counts.kwz_v;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ErrorKind natural_error_kind(const std::vector<ScenarioSpec>& specs) {
  for (const ScenarioSpec& s : specs) {
    if (s.true_l) {
      return ErrorKind::TypeII;
    }
  }
  return ErrorKind::TypeI;
}

}  // namespace scalebreak
