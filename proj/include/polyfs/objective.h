#pragma once

#include <Eigen/Dense>

#include "polyfs/data.h"

namespace polyfs {

/// A d x k matrix with orthonormal columns.
class StiefelPoint {
 public:
  /// Default orthonormality tolerance ||W^T W - I||_F.
  static constexpr double kTolerance = 1e-8;

  /// Throws NumericalError if W is not orthonormal within `tolerance`.
  explicit StiefelPoint(Eigen::MatrixXd W, double tolerance = kTolerance);

  const Eigen::MatrixXd &matrix() const { return W_; }
  Eigen::Index rows() const { return W_.rows(); }
  Eigen::Index cols() const { return W_.cols(); }

 private:
  Eigen::MatrixXd W_;
};

/// ||W^T W - I_k||_F.
double orthonormality_error(const Eigen::MatrixXd &W);

/// Centered least-squares problem min ||W^T A - B||_F^2 with A = XH and
/// B = YH, H = I - 11^T/n. H itself is never formed; centering subtracts row
/// means. Gram products are cached so evaluations cost O(d^2 k).
struct CenteredProblem {
  Eigen::MatrixXd A;         // d x n
  Eigen::MatrixXd B;         // k x n
  Eigen::MatrixXd gram_AA;   // d x d
  Eigen::MatrixXd cross_AB;  // d x k
  double b_norm_sq = 0.0;    // ||B||_F^2
  Eigen::Index d = 0;
  Eigen::Index n = 0;
  Eigen::Index k = 0;
};

/// Accepts any k x n target; throws DimensionError when d < k.
CenteredProblem build_problem(const Eigen::MatrixXd &X,
                              const Eigen::MatrixXd &Y);
CenteredProblem build_problem(const Eigen::MatrixXd &X, const OneHotLabels &Y);

/// f(W) = ||W^T A - B||_F^2 from the cached Grams.
double objective_value(const CenteredProblem &p, const StiefelPoint &W);

/// Euclidean gradient 2 (A A^T W - A B^T).
Eigen::MatrixXd gradient(const CenteredProblem &p, const StiefelPoint &W);

/// Unconstrained least-squares bias at fixed W: (Y 1 - W^T X 1) / n.
Eigen::VectorXd recover_bias(const CenteredProblem &p, const StiefelPoint &W,
                             const Eigen::MatrixXd &X, const OneHotLabels &Y);

namespace detail {

/// Objective value and the product A A^T W it was computed from, which the
/// gradient reuses.
struct Evaluation {
  double value = 0.0;
  Eigen::MatrixXd gram_W;
};

Evaluation evaluate(const CenteredProblem &p, const Eigen::MatrixXd &W);

inline Eigen::MatrixXd gradient_from(const CenteredProblem &p,
                                     const Evaluation &e) {
  return 2.0 * (e.gram_W - p.cross_AB);
}

}  // namespace detail

}  // namespace polyfs
