#pragma once

// Monte Carlo scenarios: two-regime series, break estimation with both
// estimators and the matching regime tests, repeated over seeded trials.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalebreak/distributions.hpp"
#include "scalebreak/mars.hpp"
#include "scalebreak/random.hpp"
#include "scalebreak/series.hpp"

namespace scalebreak {

struct SegmentGenerator {
  Family family = Family::Gaussian;
  GaussianParams gaussian;
  StableParams stable;
  std::size_t length = 0;

  static SegmentGenerator normal(double mu, double sigma, std::size_t length);
  static SegmentGenerator levy_stable(StableParams params, std::size_t length);

  TimeSeries draw(RandomStream& rng) const;
  /// "N(0,2)" or "S(1.8,0,1.2,0)".
  std::string label() const;
};

struct ScenarioSpec {
  std::string name;
  SegmentGenerator first_segment;
  SegmentGenerator second_segment;
  /// Shuffle the concatenated series within each trial.
  bool permute = false;
  std::size_t n_trials = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  /// Break location for H1 scenarios, nullopt under H0.
  std::optional<std::size_t> true_l;
  MarsConfig mars;

  std::size_t length() const { return first_segment.length + second_segment.length; }
  void validate() const;
};

/// Series of trial `trial`, drawn from substream `trial` of (seed, 0).
TimeSeries generate_series(const ScenarioSpec& spec, std::size_t trial);

struct RejectCounts {
  std::size_t gsw_c = 0;
  std::size_t kwz_v = 0;

  friend bool operator==(const RejectCounts&, const RejectCounts&) = default;
};

struct ScenarioReport {
  ScenarioSpec spec;
  /// Per trial; nullopt when the V estimator found no break candidate or the trial failed.
  std::vector<std::optional<std::size_t>> l_hat_v_samples;
  std::vector<std::optional<std::size_t>> l_hat_c_samples;

  /// Both tests are applied at the trial-averaged estimates (rounded).
  std::optional<std::size_t> mean_split_v;
  std::optional<std::size_t> mean_split_c;
  std::vector<double> p_value_v_samples;  // NaN for failed trials
  std::vector<double> p_value_c_samples;
  RejectCounts reject_counts;

  /// The same tests applied at each trial's own estimates.
  std::vector<double> per_trial_p_value_v;  // NaN when no estimate
  std::vector<double> per_trial_p_value_c;
  RejectCounts per_trial_reject_counts;

  /// Trials whose test at the averaged split ran (denominators for the counts).
  RejectCounts tested_trials;
  std::size_t failed_trials = 0;
  std::size_t no_break_v = 0;
  /// Per-trial diagnostic, empty for successful trials.
  std::vector<std::string> trial_errors;
  double elapsed_seconds = 0.0;
};

/// Deterministic for a fixed spec; trials run concurrently.
ScenarioReport run_scenario(const ScenarioSpec& spec);

enum class ErrorKind { TypeI, TypeII };

struct ErrorRow {
  std::string scenario;
  std::size_t gsw_c = 0;
  std::size_t kwz_v = 0;
  std::size_t n_trials = 0;
};

struct ErrorTable {
  ErrorKind kind = ErrorKind::TypeI;
  std::vector<ErrorRow> rows;
};

/// Rejection counts (TypeI) or acceptance counts (TypeII), one row per report.
ErrorTable error_summary(const std::vector<ScenarioReport>& reports, ErrorKind kind);

/// Bundled scenario sets: "table1", "table2", "fig3", "fig4", "power".
std::vector<ScenarioSpec> preset_scenarios(const std::string& name, std::size_t n_trials = 1000,
                                           std::uint64_t seed = 0);
std::vector<std::string> preset_names();

/// TypeI for sets without a planted break, TypeII otherwise.
ErrorKind natural_error_kind(const std::vector<ScenarioSpec>& specs);

}  // namespace scalebreak
