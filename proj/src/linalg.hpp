#pragma once

#include <Eigen/Dense>

namespace scalebreak::detail {

struct LeastSquaresFit {
  Eigen::VectorXd coef;
  double rss = 0.0;
  Eigen::Index rank = 0;
};

// Relative pivot threshold below which a column is treated as dependent.
inline constexpr double kRankTolerance = 1e-11;

// Minimum-norm least squares via a complete orthogonal decomposition of the
// column-equilibrated design. Zero columns get a zero coefficient.
inline LeastSquaresFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  const Eigen::Index p = design.cols();
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = design.col(j).norm();
    scale(j) = norm > 0.0 ? norm : 1.0;
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(scaled);
  LeastSquaresFit fit;
  fit.coef = cod.solve(y).cwiseQuotient(scale);
  fit.rss = (y - design * fit.coef).squaredNorm();
  fit.rank = cod.rank();
  return fit;
}

}  // namespace scalebreak::detail
