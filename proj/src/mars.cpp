#include "scalebreak/mars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "linalg.hpp"
#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Candidate knots beyond this count are thinned by raising the stride.
constexpr std::size_t kMaxCandidates = 2000;
// Forward pass stops when a step improves RSS by less than this fraction.
constexpr double kRelativeImprovement = 1e-10;
// Squared residual norms below kRoundingFloor * ||y||^2 are rounding noise;
// GCV comparisons treat them as an exact fit.
constexpr double kRoundingFloor = 1e-24;
// Normalized Gram eigenvalues below this mark a direction already spanned.
constexpr double kCollinear = 1e-10;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_inputs(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw InvalidInput("xs and ys differ in length");
  }
  if (xs.size() < 3) {
    throw InsufficientData("adaptive regression splines need at least 3 observations");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw InvalidInput("non-finite regression input");
    }
  }
}

std::size_t distinct_knot_count(const std::vector<HingeBasis>& bases) {
  std::set<double> knots;
  for (const auto& b : bases) {
    knots.insert(b.knot);
  }
  return knots.size();
}

double effective_params(std::size_t n_terms, std::size_t n_knots, double penalty) {
  return static_cast<double>(n_terms) + penalty * static_cast<double>(n_knots);
}

double gcv_or_inf(double rss, std::size_t n_obs, std::size_t n_terms, std::size_t n_knots,
                  double penalty) {
  const double m = effective_params(n_terms, n_knots, penalty);
  const double n = static_cast<double>(n_obs);
  if (m >= n) {
    return kInf;
  }
  const double shrink = 1.0 - m / n;
  return rss / (n * shrink * shrink);
}

Eigen::MatrixXd design_matrix(const std::vector<HingeBasis>& bases, std::span<const double> xs) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(xs.size()),
                    static_cast<Eigen::Index>(bases.size() + 1));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    x(row, 0) = 1.0;
    for (std::size_t j = 0; j < bases.size(); ++j) {
      x(row, static_cast<Eigen::Index>(j + 1)) = hinge_eval(bases[j], xs[i]);
    }
  }
  return x;
}

Eigen::VectorXd to_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Inner products of every hinge (x - t)+ over the candidate knots with the
// columns of `w`. `x` ascending, `knots` ascending. Column k of `proj` holds
// the products for knots[k]; norm2[k] is ||(x - knots[k])+||^2.
//
// Knots are visited right to left and each sum is advanced by the knot
// shift, so terms are accumulated from small increments instead of being
// recovered as differences of large prefix sums.
struct HingeProducts {
  Eigen::MatrixXd proj;
  std::vector<double> norm2;
};

HingeProducts hinge_products(std::span<const double> x, const RowMatrix& w,
                             std::span<const double> knots) {
  const Eigen::Index m = w.cols();
  const std::size_t k_count = knots.size();
  HingeProducts out{Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(k_count)),
                    std::vector<double>(k_count, 0.0)};
  Eigen::RowVectorXd sum_w = Eigen::RowVectorXd::Zero(m);
  Eigen::RowVectorXd sum_hw = Eigen::RowVectorXd::Zero(m);
  double h1 = 0.0;
  double h2 = 0.0;
  double active = 0.0;
  double t_prev = x.empty() ? 0.0 : x.back();
  auto i = static_cast<std::ptrdiff_t>(x.size()) - 1;
  for (std::size_t kk = k_count; kk-- > 0;) {
    const double t = knots[kk];
    const double delta = t_prev - t;
    if (delta != 0.0) {
      h2 += 2.0 * delta * h1 + delta * delta * active;
      h1 += delta * active;
      sum_hw += delta * sum_w;
    }
    while (i >= 0 && x[static_cast<std::size_t>(i)] > t) {
      const double d = x[static_cast<std::size_t>(i)] - t;
      h2 += d * d;
      h1 += d;
      active += 1.0;
      sum_w += w.row(i);
      sum_hw += d * w.row(i);
      --i;
    }
    out.proj.col(static_cast<Eigen::Index>(kk)) = sum_hw.transpose();
    out.norm2[kk] = h2;
    t_prev = t;
  }
  return out;
}

// RSS reduction from adding the hinge pair at one knot to a model whose
// orthonormal basis produced the projections `a_plus`, `a_minus` and whose
// residual has inner products `b_plus`, `b_minus` with the two hinges.
double pair_reduction(double n_plus, const Eigen::Ref<const Eigen::VectorXd>& a_plus,
                      double b_plus, double n_minus,
                      const Eigen::Ref<const Eigen::VectorXd>& a_minus, double b_minus) {
  // The hinges have disjoint support, so their raw inner product is zero.
  const bool has_plus = n_plus > 0.0;
  const bool has_minus = n_minus > 0.0;
  if (!has_plus && !has_minus) {
    return 0.0;
  }
  if (has_plus != has_minus) {
    const double n = has_plus ? n_plus : n_minus;
    const auto& a = has_plus ? a_plus : a_minus;
    const double b = has_plus ? b_plus : b_minus;
    const double g = (n - a.squaredNorm()) / n;
    if (!(g > kCollinear)) {
      return 0.0;
    }
    return b * b / (n * g);
  }
  const double s_plus = std::sqrt(n_plus);
  const double s_minus = std::sqrt(n_minus);
  const double c11 = (n_plus - a_plus.squaredNorm()) / n_plus;
  const double c22 = (n_minus - a_minus.squaredNorm()) / n_minus;
  const double c12 = -a_plus.dot(a_minus) / (s_plus * s_minus);
  const double b1 = b_plus / s_plus;
  const double b2 = b_minus / s_minus;
  if (c12 == 0.0) {
    return (c11 > kCollinear ? b1 * b1 / c11 : 0.0) + (c22 > kCollinear ? b2 * b2 / c22 : 0.0);
  }
  // Eigen-decomposition of the symmetric 2x2 normalized Gram matrix; the
  // pseudo-inverse drops directions that are already spanned.
  const double mean = 0.5 * (c11 + c22);
  const double radius = std::hypot(0.5 * (c11 - c22), c12);
  double reduction = 0.0;
  for (const double lam : {mean + radius, mean - radius}) {
    if (!(lam > kCollinear)) {
      continue;
    }
    // Both vectors solve (C - lam I) u = 0; take the better conditioned one.
    double u1 = c12;
    double u2 = lam - c11;
    if (std::hypot(lam - c22, c12) > std::hypot(u1, u2)) {
      u1 = lam - c22;
      u2 = c12;
    }
    const double proj = (u1 * b1 + u2 * b2) / std::hypot(u1, u2);
    reduction += proj * proj / lam;
  }
  return reduction;
}

}  // namespace

double hinge_eval(const HingeBasis& basis, double x) {
  return basis.direction == HingeDirection::Plus ? std::max(0.0, x - basis.knot)
                                                 : std::max(0.0, basis.knot - x);
}

void MarsConfig::validate() const {
  if (max_terms < 3) {
    throw InvalidInput("max_terms must be at least 3");
  }
  if (knot_stride < 1) {
    throw InvalidInput("knot_stride must be positive");
  }
  if (!(penalty_per_knot >= 0.0) || !std::isfinite(penalty_per_knot)) {
    throw InvalidInput("penalty_per_knot must be a nonnegative number");
  }
}

double MarsModel::predict(double x) const {
  double y = intercept;
  for (const auto& term : terms) {
    y += term.coefficient * hinge_eval(term.basis, x);
  }
  return y;
}

std::vector<double> MarsModel::knots() const {
  std::set<double> distinct;
  for (const auto& term : terms) {
    distinct.insert(term.basis.knot);
  }
  return {distinct.begin(), distinct.end()};
}

std::vector<HingeBasis> MarsModel::bases() const {
  std::vector<HingeBasis> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    out.push_back(term.basis);
  }
  return out;
}

std::vector<double> candidate_knots(std::span<const double> xs, int stride) {
  if (xs.empty()) {
    throw InvalidInput("candidate knots of an empty input");
  }
  if (stride < 1) {
    throw InvalidInput("knot stride must be positive");
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out;
  const auto step = static_cast<std::size_t>(stride);
  for (std::size_t i = 0; i < sorted.size(); i += step) {
    out.push_back(sorted[i]);
  }
  if (out.back() != sorted.back()) {
    out.push_back(sorted.back());
  }
  return out;
}

int effective_knot_stride(std::size_t n_obs, const MarsConfig& config) {
  const auto automatic = static_cast<int>((n_obs + kMaxCandidates - 1) / kMaxCandidates);
  return std::max({config.knot_stride, automatic, 1});
}

double gcv_score(double rss, std::size_t n_obs, std::size_t n_terms, std::size_t n_knots,
                 double penalty_per_knot) {
  if (n_obs < 1) {
    throw InvalidInput("GCV needs at least one observation");
  }
  const double m = effective_params(n_terms, n_knots, penalty_per_knot);
  if (m >= static_cast<double>(n_obs)) {
    throw DegenerateModel("effective parameters " + std::to_string(m) + " reach the sample size " +
                          std::to_string(n_obs));
  }
  return gcv_or_inf(rss, n_obs, n_terms, n_knots, penalty_per_knot);
}

MarsModel refit_bases(std::vector<HingeBasis> bases, std::span<const double> xs,
                      std::span<const double> ys, const MarsConfig& config) {
  const Eigen::MatrixXd design = design_matrix(bases, xs);
  const auto fit = detail::least_squares(design, to_vector(ys));
  MarsModel model;
  model.intercept = fit.coef(0);
  for (std::size_t j = 0; j < bases.size(); ++j) {
    model.terms.push_back({bases[j], fit.coef(static_cast<Eigen::Index>(j + 1))});
  }
  model.rss = fit.rss;
  const std::size_t n_knots = distinct_knot_count(bases);
  model.effective_params = effective_params(bases.size() + 1, n_knots, config.penalty_per_knot);
  model.gcv = gcv_or_inf(fit.rss, xs.size(), bases.size() + 1, n_knots, config.penalty_per_knot);
  return model;
}

MarsModel forward_pass(std::span<const double> xs, std::span<const double> ys,
                       const MarsConfig& config) {
  config.validate();
  check_inputs(xs, ys);
  const std::size_t n = xs.size();
  const auto rows = static_cast<Eigen::Index>(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> x(n);
  Eigen::VectorXd y(rows);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = xs[order[i]];
    y(static_cast<Eigen::Index>(i)) = ys[order[i]];
  }
  // Mirrored copy: (t - x)+ == (x' - t')+ with x' = -x, t' = -t.
  std::vector<double> x_mirror(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_mirror[i] = -x[n - 1 - i];
  }

  const std::vector<double> knots = candidate_knots(xs, effective_knot_stride(n, config));
  std::vector<double> knots_mirror(knots.size());
  for (std::size_t k = 0; k < knots.size(); ++k) {
    knots_mirror[k] = -knots[knots.size() - 1 - k];
  }

  const auto max_cols = static_cast<Eigen::Index>(config.max_terms);
  Eigen::MatrixXd basis(rows, max_cols);
  basis.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::Index rank = 1;
  Eigen::VectorXd resid = y.array() - y.mean();
  double rss = resid.squaredNorm();
  const double floor = kRoundingFloor * y.squaredNorm();

  std::vector<HingeBasis> terms;
  RowMatrix w;
  RowMatrix w_mirror;
  while (static_cast<int>(terms.size()) + 3 <= config.max_terms && rss > floor) {
    w.resize(rows, rank + 1);
    w.leftCols(rank) = basis.leftCols(rank);
    w.col(rank) = resid;
    w_mirror = w.colwise().reverse();
    const HingeProducts plus = hinge_products(x, w, knots);
    const HingeProducts minus = hinge_products(x_mirror, w_mirror, knots_mirror);

    double best = 0.0;
    std::size_t best_k = knots.size();
    for (std::size_t k = 0; k < knots.size(); ++k) {
      const auto kp = static_cast<Eigen::Index>(k);
      const auto km = static_cast<Eigen::Index>(knots.size() - 1 - k);
      const double reduction =
          pair_reduction(plus.norm2[k], plus.proj.col(kp).head(rank), plus.proj(rank, kp),
                         minus.norm2[knots.size() - 1 - k], minus.proj.col(km).head(rank),
                         minus.proj(rank, km));
      // Strict improvement beyond rounding: ties keep the smaller knot.
      if (reduction > best + 1e-12 * rss) {
        best = reduction;
        best_k = k;
      }
    }
    if (best_k == knots.size() || best < kRelativeImprovement * rss) {
      break;
    }

    const double t = knots[best_k];
    for (HingeDirection dir : {HingeDirection::Plus, HingeDirection::Minus}) {
      const HingeBasis hinge{t, dir};
      Eigen::VectorXd col(rows);
      for (std::size_t i = 0; i < n; ++i) {
        col(static_cast<Eigen::Index>(i)) = hinge_eval(hinge, x[i]);
      }
      const double raw = col.squaredNorm();
      if (raw == 0.0) {
        continue;  // knot at the edge of the data: this side is identically zero
      }
      terms.push_back(hinge);
      // Two rounds of Gram-Schmidt keep the basis orthonormal to rounding.
      for (int round = 0; round < 2; ++round) {
        col -= basis.leftCols(rank) * (basis.leftCols(rank).transpose() * col);
      }
      const double remaining = col.squaredNorm();
      if (remaining > kCollinear * raw && rank < max_cols) {
        basis.col(rank) = col / std::sqrt(remaining);
        ++rank;
      }
    }
    resid = y - basis.leftCols(rank) * (basis.leftCols(rank).transpose() * y);
    rss = resid.squaredNorm();
  }

  return refit_bases(std::move(terms), xs, ys, config);
}

std::vector<PruneStep> pruning_path(const MarsModel& model, std::span<const double> xs,
                                    std::span<const double> ys, const MarsConfig& config) {
  config.validate();
  check_inputs(xs, ys);
  const std::vector<HingeBasis> all = model.bases();
  const std::size_t n = xs.size();
  const Eigen::MatrixXd design = design_matrix(all, xs);
  const Eigen::Index p = design.cols();

  // One QR of the equilibrated full design. For any column subset S,
  // RSS(S) = ||Q^T y - R[:, S] b||^2 minimized over b, which splits into the
  // fixed tail of Q^T y plus a small p-row problem.
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = design.col(j).norm();
    scale(j) = norm > 0.0 ? norm : 1.0;
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled);
  const Eigen::VectorXd qty = qr.householderQ().adjoint() * to_vector(ys);
  const Eigen::Index top = std::min<Eigen::Index>(p, static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(top).triangularView<Eigen::Upper>().toDenseMatrix();
  const Eigen::VectorXd z = qty.head(top);
  const double tail = qty.tail(static_cast<Eigen::Index>(n) - top).squaredNorm();

  auto subset_rss = [&](const std::vector<std::size_t>& active) {
    Eigen::MatrixXd sub(top, static_cast<Eigen::Index>(active.size() + 1));
    sub.col(0) = r.col(0);
    for (std::size_t j = 0; j < active.size(); ++j) {
      sub.col(static_cast<Eigen::Index>(j + 1)) = r.col(static_cast<Eigen::Index>(active[j] + 1));
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(detail::kRankTolerance);
    cod.compute(sub);
    const Eigen::VectorXd b = cod.solve(z);
    return tail + (z - sub * b).squaredNorm();
  };

  auto make_step = [&](const std::vector<std::size_t>& active, double rss) {
    PruneStep step;
    for (std::size_t idx : active) {
      step.bases.push_back(all[idx]);
    }
    step.rss = rss;
    step.gcv = gcv_or_inf(rss, n, active.size() + 1, distinct_knot_count(step.bases),
                          config.penalty_per_knot);
    return step;
  };

  std::vector<std::size_t> active(all.size());
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::vector<PruneStep> path;
  path.push_back(make_step(active, subset_rss(active)));
  while (!active.empty()) {
    double best_rss = kInf;
    std::size_t best_pos = 0;
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
      std::vector<std::size_t> trial = active;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(pos));
      const double rss = subset_rss(trial);
      // On ties the later-added term goes first.
      if (rss <= best_rss) {
        best_rss = rss;
        best_pos = pos;
      }
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_pos));
    path.push_back(make_step(active, best_rss));
  }
  return path;
}

MarsModel backward_prune(const MarsModel& model, std::span<const double> xs,
                         std::span<const double> ys, const MarsConfig& config) {
  if (model.terms.empty()) {
    return model;
  }
  const std::vector<PruneStep> path = pruning_path(model, xs, ys, config);
  const double floor = kRoundingFloor * to_vector(ys).squaredNorm();
  std::size_t best = 0;
  double best_score = kInf;
  for (std::size_t s = 0; s < path.size(); ++s) {
    const auto& step = path[s];
    const double score =
        gcv_or_inf(std::max(step.rss, floor), xs.size(), step.bases.size() + 1,
                   distinct_knot_count(step.bases), config.penalty_per_knot);
    // Later steps are smaller models; they win ties.
    if (score <= best_score) {
      best_score = score;
      best = s;
    }
  }
  return refit_bases(path[best].bases, xs, ys, config);
}

MarsModel fit_mars(std::span<const double> xs, std::span<const double> ys,
                   const MarsConfig& config) {
  return backward_prune(forward_pass(xs, ys, config), xs, ys, config);
}

}  // namespace scalebreak
