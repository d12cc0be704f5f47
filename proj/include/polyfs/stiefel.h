#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polyfs/objective.h"

namespace polyfs {

/// Convex weights (alpha, beta, gamma) of the three tangent directions.
/// Each weight is at least 0.01 and the three sum to one.
class SimplexWeights {
 public:
  static constexpr double kMinWeight = 0.01;

  /// Throws ConfigError on infeasible weights.
  SimplexWeights(double alpha, double beta, double gamma);

  static SimplexWeights uniform() { return {1.0 / 3, 1.0 / 3, 1.0 / 3}; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  friend bool operator==(const SimplexWeights &, const SimplexWeights &) =
      default;

 private:
  double alpha_, beta_, gamma_;
};

enum class SearchMode {
  Hybrid,  // weighted three-way direction, averaged step length
  Plain,   // G - W G^T W only, step length used as is
};

struct SearchConfig {
  /// Stop once ||G - W G^T W||_F <= eps_grad; unset means 1e-4 sqrt(d k).
  std::optional<double> eps_grad;
  double dt_init = 1e-2;
  double dt_min = 1e-10;
  double dt_max = 1e2;
  double rho = 1e-4;   // sufficient decrease
  double delta = 0.5;  // backtracking shrink factor
  double mu = 0.85;    // memory of the reference value
  int max_iters = 1000;
  std::uint64_t seed = 0;
  SearchMode mode = SearchMode::Hybrid;

  double resolved_eps_grad(Eigen::Index d, Eigen::Index k) const;

  /// Throws ConfigError unless every parameter is in range.
  void validate() const;
};

/// History of one minimize() run. Entries 0..c describe the iterates; step
/// m (0-based) moved iterate m to iterate m+1.
struct DescentTrace {
  std::vector<double> f_values;         // c + 1
  std::vector<double> grad_norms;       // c + 1, Riemannian
  std::vector<double> reference_values; // c + 1, non-monotone reference C_m
  std::vector<double> orthonormality;   // c + 1, ||W^T W - I||_F
  std::vector<double> accepted_steps;   // c
  std::vector<double> tangency;         // c, ||W^T F + F^T W||_F per step
  std::vector<int> backtracks;          // c, shrinks before acceptance
  std::vector<int> floored_steps;       // steps accepted at dt_min
  std::vector<int> direction_fallbacks; // steps that reverted to F1 alone
  bool converged = false;
  int iterations = 0;
  SearchMode mode = SearchMode::Hybrid;
};

/// Orthonormal factor of a seeded Gaussian d x k matrix (thin QR with
/// positive R diagonal).
StiefelPoint init_stiefel(Eigen::Index d, Eigen::Index k, std::uint64_t seed);

/// F1 = G - W G^T W.
Eigen::MatrixXd riemannian_gradient(const Eigen::MatrixXd &W,
                                    const Eigen::MatrixXd &G);

/// The three tangent projections of G at W.
struct TangentDirections {
  Eigen::MatrixXd F1;  // G - W G^T W
  Eigen::MatrixXd F2;  // (I - W W^T) G
  Eigen::MatrixXd F3;  // (I/2 - W W^T/2) G
};

TangentDirections tangent_directions(const StiefelPoint &W,
                                     const Eigen::MatrixXd &G);

/// alpha F1 + beta F2 + gamma F3. The result is tangent at W.
Eigen::MatrixXd hybrid_direction(const StiefelPoint &W,
                                 const Eigen::MatrixXd &G,
                                 const SimplexWeights &weights);

/// Barzilai-Borwein step from the secant pair of iteration m >= 0:
/// S = W_{m+1} - W_m and O = grad(W_{m+1}) - grad(W_m), Riemannian gradients.
/// Even m uses ||S||^2/|<S,O>|, odd m uses |<S,O>|/||O||^2. The result drives
/// iteration m + 1. Clamped to [dt_min, dt_max]; degenerate curvature falls
/// back to dt_init.
double bb_step(int m, const Eigen::MatrixXd &S, const Eigen::MatrixXd &O,
               const SearchConfig &cfg);

/// Projects Q onto the Stiefel manifold: U V^T from the thin SVD Q = U S V^T,
/// the closest orthonormal matrix in Frobenius norm. Throws NumericalError
/// when Q is numerically rank deficient.
StiefelPoint retract(const Eigen::MatrixXd &Q);

/// W - ((dt_prev + dt_curr) / 2) F.
Eigen::MatrixXd tangent_step(const StiefelPoint &W, const Eigen::MatrixXd &F,
                             double dt_prev, double dt_curr);

struct MinimizeResult {
  StiefelPoint W;
  DescentTrace trace;
};

/// Non-monotone line search on the Stiefel manifold from
/// init_stiefel(d, k, cfg.seed).
MinimizeResult minimize(const CenteredProblem &p, const SimplexWeights &weights,
                        const SearchConfig &cfg);

/// Same, from a caller-supplied starting point.
MinimizeResult minimize(const CenteredProblem &p, const SimplexWeights &weights,
                        const SearchConfig &cfg, const StiefelPoint &W0);

}  // namespace polyfs
