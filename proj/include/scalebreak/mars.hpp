#pragma once

// Univariate adaptive regression splines: reflected hinge pairs added by a
// greedy forward pass, then pruned term by term under generalized
// cross-validation.

#include <cstddef>
#include <span>
#include <vector>

namespace scalebreak {

enum class HingeDirection {
  Plus,   // (x - t)+
  Minus,  // (t - x)+
};

struct HingeBasis {
  double knot = 0.0;
  HingeDirection direction = HingeDirection::Plus;

  friend bool operator==(const HingeBasis&, const HingeBasis&) = default;
};

double hinge_eval(const HingeBasis& basis, double x);

struct MarsConfig {
  /// Upper bound on basis functions, intercept included.
  int max_terms = 21;
  /// Keep every stride-th distinct x as a candidate knot. Raised to
  /// ceil(N / 2000) for long inputs.
  int knot_stride = 1;
  /// GCV charge for each distinct knot.
  double penalty_per_knot = 3.0;

  void validate() const;
};

struct MarsTerm {
  HingeBasis basis;
  double coefficient = 0.0;
};

struct MarsModel {
  double intercept = 0.0;
  std::vector<MarsTerm> terms;
  double gcv = 0.0;
  double rss = 0.0;
  /// Terms (intercept included) plus penalty_per_knot per distinct knot.
  double effective_params = 1.0;

  double predict(double x) const;
  /// Distinct knots, ascending.
  std::vector<double> knots() const;
  std::vector<HingeBasis> bases() const;
};

/// One model on the backward deletion path.
struct PruneStep {
  std::vector<HingeBasis> bases;
  double rss = 0.0;
  double gcv = 0.0;  // +inf when effective parameters reach N
};

/// Distinct x values in ascending order, thinned to every stride-th value.
/// The largest value is always kept.
std::vector<double> candidate_knots(std::span<const double> xs, int stride);

int effective_knot_stride(std::size_t n_obs, const MarsConfig& config);

/// rss / (N (1 - M/N)^2) with M = n_terms + penalty_per_knot * n_knots.
/// Throws DegenerateModel when M >= N.
double gcv_score(double rss, std::size_t n_obs, std::size_t n_terms, std::size_t n_knots,
                 double penalty_per_knot);

MarsModel forward_pass(std::span<const double> xs, std::span<const double> ys,
                       const MarsConfig& config);

/// Full deletion sequence starting from `model`, ending at the intercept-only
/// model. Each step removes the term whose removal increases RSS least.
std::vector<PruneStep> pruning_path(const MarsModel& model, std::span<const double> xs,
                                    std::span<const double> ys, const MarsConfig& config);

MarsModel backward_prune(const MarsModel& model, std::span<const double> xs,
                         std::span<const double> ys, const MarsConfig& config);

MarsModel fit_mars(std::span<const double> xs, std::span<const double> ys,
                   const MarsConfig& config);

/// Least-squares coefficients for a fixed basis set (minimum-norm when the
/// design is rank deficient).
MarsModel refit_bases(std::vector<HingeBasis> bases, std::span<const double> xs,
                      std::span<const double> ys, const MarsConfig& config);

}  // namespace scalebreak
