#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "polyfs/data.h"
#include "polyfs/polygon.h"

namespace polyfs {

/// One-vs-rest ridge least-squares classifier.
struct LinearModel {
  Eigen::MatrixXd weights;  // d x k
  Eigen::VectorXd bias;     // k

  /// Class scores W^T x + b for each column of X.
  Eigen::MatrixXd scores(const Eigen::MatrixXd &X) const;
  /// Argmax of the scores; ties go to the smaller class index.
  std::vector<int> predict(const Eigen::MatrixXd &X) const;
};

/// Minimizes ||W^T X + b 1^T - Y||^2 + ridge ||W||^2 (the bias is not
/// penalized). X is d x n, Y is k x n. ridge = 0 on a singular system throws
/// NumericalError.
LinearModel train_linear(const Eigen::MatrixXd &X, const OneHotLabels &Y,
                         double ridge = 1e-3);

/// Euclidean k-nearest-neighbour majority vote. Ties between classes go to
/// the smallest mean neighbour distance, then to the smallest class index.
std::vector<int> knn_predict(const Eigen::MatrixXd &X_train,
                             const std::vector<int> &labels_train,
                             const Eigen::MatrixXd &X_test, int k);

double accuracy(const std::vector<int> &predicted,
                const std::vector<int> &truth);

enum class Classifier { Linear, Knn };

struct EvalConfig {
  int n_trials = 20;
  Classifier classifier = Classifier::Linear;
  int knn_k = 5;
  double ridge = 1e-3;
  std::vector<int> elimination_schedule;  // empty = default_schedule(d)
  std::uint64_t base_seed = 0;
  bool paired = true;    // reuse the trial split seeds at every subset size
  unsigned threads = 1;  // 0 = hardware concurrency

  void validate(Eigen::Index d) const;
};

struct CurvePoint {
  int subset_size = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over trials
};

struct EvalCurve {
  std::vector<CurvePoint> points;
  int best_size = 0;
  double best_accuracy = 0.0;
};

/// d, d-1, ..., 1 for d <= 64; otherwise 32 distinct, roughly geometric sizes
/// from d down to 1.
std::vector<int> default_schedule(int d);

/// Split seed of trial t at a given subset size. Paired mode ignores the size.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial, int subset_size,
                         bool paired);

/// Keeps the top-s ranked features for each scheduled size s and averages the
/// holdout accuracy of the configured classifier over n_trials stratified
/// 70/30 splits.
EvalCurve backward_eliminate(const Dataset &ds, const FeatureRanking &ranking,
                             const EvalConfig &cfg);

}  // namespace polyfs
