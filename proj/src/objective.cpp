#include "polyfs/objective.h"

#include <algorithm>
#include <sstream>
#include <string>

#include "polyfs/error.h"

namespace polyfs {

double orthonormality_error(const Eigen::MatrixXd &W) {
  const Eigen::Index k = W.cols();
  return (W.transpose() * W - Eigen::MatrixXd::Identity(k, k)).norm();
}

StiefelPoint::StiefelPoint(Eigen::MatrixXd W, double tolerance)
    : W_(std::move(W)) {
  if (W_.rows() < W_.cols()) {
    throw DimensionError("Stiefel point needs rows >= cols, got " +
                         std::to_string(W_.rows()) + "x" +
                         std::to_string(W_.cols()));
  }
  const double err = orthonormality_error(W_);
  if (!(err <= tolerance)) {
    std::ostringstream msg;
    msg << "matrix is not orthonormal: ||W^T W - I||_F = " << err
        << " exceeds " << tolerance;
    throw NumericalError(msg.str());
  }
}

CenteredProblem build_problem(const Eigen::MatrixXd &X,
                              const Eigen::MatrixXd &Y) {
  if (X.cols() != Y.cols()) {
    throw DataError("X has " + std::to_string(X.cols()) + " samples but Y has " +
                    std::to_string(Y.cols()));
  }
  if (X.rows() < Y.rows()) {
    throw DimensionError(
        "W^T W = I_k needs d >= k, but the data has d = " +
        std::to_string(X.rows()) + " features and k = " +
        std::to_string(Y.rows()) + " classes");
  }
  if (X.cols() < 1) throw DataError("problem needs at least one sample");

  CenteredProblem p;
  p.d = X.rows();
  p.n = X.cols();
  p.k = Y.rows();
  p.A = X.colwise() - X.rowwise().mean();
  p.B = Y.colwise() - Y.rowwise().mean();
  p.gram_AA.noalias() = p.A * p.A.transpose();
  p.cross_AB.noalias() = p.A * p.B.transpose();
  p.b_norm_sq = p.B.squaredNorm();
  return p;
}

CenteredProblem build_problem(const Eigen::MatrixXd &X, const OneHotLabels &Y) {
  return build_problem(X, Y.matrix);
}

namespace detail {

Evaluation evaluate(const CenteredProblem &p, const Eigen::MatrixXd &W) {
  Evaluation e;
  e.gram_W.noalias() = p.gram_AA * W;
  // tr(W^T AA^T W) - 2 tr(W^T AB^T) + ||B||^2
  const double quad = W.cwiseProduct(e.gram_W).sum();
  const double cross = W.cwiseProduct(p.cross_AB).sum();
  e.value = std::max(0.0, quad - 2.0 * cross + p.b_norm_sq);
  return e;
}

}  // namespace detail

double objective_value(const CenteredProblem &p, const StiefelPoint &W) {
  return detail::evaluate(p, W.matrix()).value;
}

Eigen::MatrixXd gradient(const CenteredProblem &p, const StiefelPoint &W) {
  return 2.0 * (p.gram_AA * W.matrix() - p.cross_AB);
}

Eigen::VectorXd recover_bias(const CenteredProblem &p, const StiefelPoint &W,
                             const Eigen::MatrixXd &X, const OneHotLabels &Y) {
  const double n = static_cast<double>(p.n);
  return (Y.matrix.rowwise().sum() -
          W.matrix().transpose() * X.rowwise().sum()) /
         n;
}

}  // namespace polyfs
