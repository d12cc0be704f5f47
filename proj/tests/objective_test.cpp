#include <gtest/gtest.h>

#include "polyfs/error.h"
#include "polyfs/objective.h"
#include "polyfs/random.h"
#include "synthetic.h"

using namespace polyfs;

namespace {

// Direct evaluation without the cached Grams.
double direct_objective(const CenteredProblem &p, const Eigen::MatrixXd &W) {
  return (W.transpose() * p.A - p.B).squaredNorm();
}

Eigen::MatrixXd finite_difference_gradient(const CenteredProblem &p,
                                           const Eigen::MatrixXd &W,
                                           double h) {
  Eigen::MatrixXd fd(W.rows(), W.cols());
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      Eigen::MatrixXd plus = W, minus = W;
      plus(i, j) += h;
      minus(i, j) -= h;
      fd(i, j) =
          (direct_objective(p, plus) - direct_objective(p, minus)) / (2 * h);
    }
  }
  return fd;
}

double max_relative_error(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), 1e-8});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

}  // namespace

TEST(BuildProblem, CentersRows) {
  const auto p = build_problem(Eigen::MatrixXd{{1.0, 3.0}},
                               Eigen::MatrixXd{{1.0, 0.0}});
  EXPECT_EQ(p.A, (Eigen::MatrixXd{{-1.0, 1.0}}));
}

TEST(BuildProblem, CenteredOneHotLabels) {
  // YH for labels (0, 1): each row loses its mean 1/2.
  const auto p = build_problem(Eigen::MatrixXd{{1.0, 3.0}, {0.0, 2.0}},
                               one_hot({0, 1}, 2));
  EXPECT_EQ(p.B, (Eigen::MatrixXd{{0.5, -0.5}, {-0.5, 0.5}}));
}

TEST(BuildProblem, InfeasibleShapes) {
  EXPECT_THROW(build_problem(Eigen::MatrixXd::Ones(3, 10),
                             Eigen::MatrixXd::Ones(5, 10)),
               DimensionError);
  try {
    build_problem(Eigen::MatrixXd::Ones(3, 10), Eigen::MatrixXd::Ones(5, 10));
  } catch (const DimensionError &e) {
    EXPECT_NE(std::string(e.what()).find("d >= k"), std::string::npos);
  }
}

TEST(BuildProblem, CenteringAndGramInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = synth::random_classification_problem(8, 3, 50, seed);
    const double tol = 1e-9 * static_cast<double>(p.n);
    EXPECT_LE(p.A.rowwise().sum().cwiseAbs().maxCoeff(), tol);
    EXPECT_LE(p.B.rowwise().sum().cwiseAbs().maxCoeff(), tol);
    EXPECT_TRUE(p.gram_AA.isApprox(p.gram_AA.transpose()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.gram_AA);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9 * eig.eigenvalues().maxCoeff());
  }
}

TEST(Objective, PerfectFitIsZero) {
  const Eigen::MatrixXd X = synth::gaussian_matrix(5, 30, 1);
  const Eigen::MatrixXd W = synth::random_orthonormal(5, 2, 2);
  const auto p = build_problem(X, W.transpose() * X);
  EXPECT_NEAR(objective_value(p, StiefelPoint(W)), 0.0, 1e-10);
}

TEST(Objective, IdentityCase) {
  const Eigen::MatrixXd X = synth::gaussian_matrix(3, 20, 3);
  const auto p = build_problem(X, X);
  EXPECT_NEAR(objective_value(p, StiefelPoint(Eigen::MatrixXd::Identity(3, 3))),
              0.0, 1e-10);
}

TEST(Objective, GramPathMatchesDirectEvaluation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = synth::random_classification_problem(5, 3, 40, seed);
    const Eigen::MatrixXd W = synth::random_orthonormal(5, 3, seed + 100);
    const double direct = direct_objective(p, W);
    const double cached = objective_value(p, StiefelPoint(W));
    EXPECT_NEAR(cached, direct, 1e-10 * std::max(1.0, direct));
    EXPECT_LE(std::abs(cached - direct), 1e-9 * direct);
  }
}

TEST(Objective, InvariantUnderSamplePermutation) {
  const Eigen::MatrixXd X = synth::gaussian_matrix(6, 25, 9);
  const auto Y = one_hot(std::vector<int>{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0,
                                          1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0},
                         3);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(25);
  perm.setIdentity();
  Rng rng(4);
  std::span<int> idx(perm.indices().data(), 25);
  rng.shuffle(idx);
  const StiefelPoint W(synth::random_orthonormal(6, 3, 10));
  const auto p = build_problem(X, Y);
  const auto q = build_problem(X * perm, Y.matrix * perm);
  EXPECT_NEAR(objective_value(p, W), objective_value(q, W),
              1e-10 * objective_value(p, W));
}

TEST(Gradient, ZeroAtUnconstrainedStationaryPoint) {
  // With W^T A = B exactly, A A^T W = A B^T, so G vanishes.
  const Eigen::MatrixXd X = synth::gaussian_matrix(4, 30, 5);
  const Eigen::MatrixXd W = synth::random_orthonormal(4, 2, 6);
  const auto p = build_problem(X, W.transpose() * X);
  EXPECT_LE(gradient(p, StiefelPoint(W)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Gradient, MatchesCentralFiniteDifferences) {
  const auto p = synth::random_classification_problem(6, 2, 30, 77);
  const Eigen::MatrixXd W = synth::random_orthonormal(6, 2, 78);
  const Eigen::MatrixXd G = gradient(p, StiefelPoint(W));
  EXPECT_LE(max_relative_error(G, finite_difference_gradient(p, W, 1e-6)), 1e-5);
}

TEST(Gradient, FiniteDifferenceSweep) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(seed % 6);
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(seed % 2);
    const auto p = synth::random_classification_problem(d, k, 25, seed);
    const Eigen::MatrixXd W = synth::random_orthonormal(p.d, p.k, seed + 1000);
    const Eigen::MatrixXd G = gradient(p, StiefelPoint(W));
    EXPECT_LE(max_relative_error(G, finite_difference_gradient(p, W, 1e-6)), 1e-5)
        << "seed " << seed;
  }
}

TEST(Gradient, QuadraticHomogeneity) {
  const Eigen::MatrixXd X = synth::gaussian_matrix(5, 20, 21);
  const Eigen::MatrixXd Y = synth::gaussian_matrix(2, 20, 22);
  const StiefelPoint W(synth::random_orthonormal(5, 2, 23));
  const Eigen::MatrixXd G1 = gradient(build_problem(X, Y), W);
  const Eigen::MatrixXd G2 = gradient(build_problem(2 * X, 2 * Y), W);
  EXPECT_TRUE(G2.isApprox(4 * G1, 1e-12));
}

TEST(RecoverBias, BalancedCenteredData) {
  const int k = 3, n = 30;
  Eigen::MatrixXd X = synth::gaussian_matrix(4, n, 31);
  X = X.colwise() - X.rowwise().mean();
  std::vector<int> labels(n);
  for (int j = 0; j < n; ++j) labels[static_cast<std::size_t>(j)] = j % k;
  const auto Y = one_hot(labels, k);
  const auto p = build_problem(X, Y);
  const StiefelPoint W(synth::random_orthonormal(4, k, 32));
  const Eigen::VectorXd b = recover_bias(p, W, X, Y);
  EXPECT_TRUE(b.isApprox(Eigen::VectorXd::Constant(k, 1.0 / k), 1e-12));
}

TEST(RecoverBias, ExactCancellation) {
  // Columns of X chosen so that W^T X 1 = Y 1.
  const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd X{{1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}};
  const auto Y = one_hot({0, 1, 0}, 2);
  const auto p = build_problem(X, Y);
  EXPECT_TRUE(recover_bias(p, StiefelPoint(W), X, Y).isZero(1e-15));
}

TEST(RecoverBias, MinimizesTheBiasedObjective) {
  const Eigen::MatrixXd X = synth::gaussian_matrix(5, 40, 41);
  std::vector<int> labels(40);
  for (int j = 0; j < 40; ++j) labels[static_cast<std::size_t>(j)] = (j * 7) % 3;
  const auto Y = one_hot(labels, 3);
  const auto p = build_problem(X, Y);
  const StiefelPoint W(synth::random_orthonormal(5, 3, 42));
  const Eigen::VectorXd b = recover_bias(p, W, X, Y);
  auto full = [&](const Eigen::VectorXd &bias) {
    return ((W.matrix().transpose() * X).colwise() + bias - Y.matrix)
        .squaredNorm();
  };
  const double at_b = full(b);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (double h : {1e-3, -1e-3, 0.1, -0.1}) {
      Eigen::VectorXd moved = b;
      moved(i) += h;
      EXPECT_GT(full(moved), at_b);
    }
  }
  // The reduced objective equals the biased one at the optimal bias.
  EXPECT_NEAR(objective_value(p, W), at_b, 1e-9 * at_b);
}

TEST(StiefelPoint, RejectsNonOrthonormal) {
  EXPECT_THROW(StiefelPoint(Eigen::MatrixXd::Ones(3, 2)), NumericalError);
  EXPECT_THROW(StiefelPoint(Eigen::MatrixXd::Identity(2, 3)), DimensionError);
  EXPECT_NO_THROW(StiefelPoint(Eigen::MatrixXd::Identity(3, 2)));
}
