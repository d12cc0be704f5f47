#include "polyfs/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyfs/error.h"
#include "polyfs/parallel.h"
#include "polyfs/random.h"

namespace polyfs {

Eigen::MatrixXd LinearModel::scores(const Eigen::MatrixXd &X) const {
  return (weights.transpose() * X).colwise() + bias;
}

std::vector<int> LinearModel::predict(const Eigen::MatrixXd &X) const {
  const Eigen::MatrixXd s = scores(X);
  std::vector<int> out(static_cast<std::size_t>(s.cols()));
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < s.rows(); ++c) {
      if (s(c, j) > s(best, j)) best = c;
    }
    out[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return out;
}

LinearModel train_linear(const Eigen::MatrixXd &X, const OneHotLabels &Y,
                         double ridge) {
  const Eigen::MatrixXd &y = Y.matrix;
  if (X.cols() != y.cols() || X.cols() == 0) {
    throw DataError("training features and labels disagree on sample count");
  }
  if ((y.rowwise().sum().array() > 0.0).count() < 2) {
    throw DataError("training data needs at least two classes");
  }
  if (ridge < 0.0) throw ConfigError("ridge must be non-negative");

  const Eigen::VectorXd x_mean = X.rowwise().mean();
  const Eigen::VectorXd y_mean = y.rowwise().mean();
  const Eigen::MatrixXd A = X.colwise() - x_mean;
  const Eigen::MatrixXd B = y.colwise() - y_mean;

  Eigen::MatrixXd lhs = A * A.transpose();
  lhs.diagonal().array() += ridge;
  const Eigen::MatrixXd rhs = A * B.transpose();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  // rcond() misses exact zero pivots, so check the pivot spread as well.
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(pivots.minCoeff() > 1e-12 * pivots.maxCoeff()) ||
      !(ldlt.rcond() > 1e-12)) {
    throw NumericalError(
        "ridge system is singular; use a positive ridge (default 1e-3)");
  }
  LinearModel model;
  model.weights = ldlt.solve(rhs);
  model.bias = y_mean - model.weights.transpose() * x_mean;
  return model;
}

std::vector<int> knn_predict(const Eigen::MatrixXd &X_train,
                             const std::vector<int> &labels_train,
                             const Eigen::MatrixXd &X_test, int k) {
  const auto n_train = static_cast<std::size_t>(X_train.cols());
  if (labels_train.size() != n_train) {
    throw DataError("training features and labels disagree on sample count");
  }
  if (k < 1 || static_cast<std::size_t>(k) > n_train) {
    throw ConfigError("knn k must lie in [1, " + std::to_string(n_train) +
                      "], got " + std::to_string(k));
  }
  if (X_test.rows() != X_train.rows()) {
    throw DataError("train and test feature counts differ");
  }
  const int n_classes =
      *std::max_element(labels_train.begin(), labels_train.end()) + 1;

  std::vector<int> out(static_cast<std::size_t>(X_test.cols()));
  std::vector<std::pair<double, std::size_t>> dist(n_train);
  std::vector<int> votes(static_cast<std::size_t>(n_classes));
  std::vector<double> dist_sum(static_cast<std::size_t>(n_classes));
  for (Eigen::Index t = 0; t < X_test.cols(); ++t) {
    for (std::size_t i = 0; i < n_train; ++i) {
      dist[i] = {(X_train.col(static_cast<Eigen::Index>(i)) - X_test.col(t))
                     .squaredNorm(),
                 i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (int i = 0; i < k; ++i) {
      const auto c = static_cast<std::size_t>(labels_train[dist[static_cast<std::size_t>(i)].second]);
      ++votes[c];
      dist_sum[c] += std::sqrt(dist[static_cast<std::size_t>(i)].first);
    }
    int best = -1;
    for (int c = 0; c < n_classes; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      if (votes[cu] == 0) continue;
      if (best < 0) {
        best = c;
        continue;
      }
      const auto bu = static_cast<std::size_t>(best);
      if (votes[cu] > votes[bu] ||
          (votes[cu] == votes[bu] &&
           dist_sum[cu] / votes[cu] < dist_sum[bu] / votes[bu])) {
        best = c;
      }
    }
    out[static_cast<std::size_t>(t)] = best;
  }
  return out;
}

double accuracy(const std::vector<int> &predicted,
                const std::vector<int> &truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw DataError("accuracy needs equally sized, non-empty label vectors");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

void EvalConfig::validate(Eigen::Index d) const {
  if (n_trials < 1) throw ConfigError("n_trials must be at least 1");
  if (knn_k < 1) throw ConfigError("knn k must be at least 1");
  if (ridge < 0.0) throw ConfigError("ridge must be non-negative");
  for (std::size_t i = 0; i < elimination_schedule.size(); ++i) {
    const int s = elimination_schedule[i];
    if (s < 1 || s > d) {
      throw ConfigError("subset size " + std::to_string(s) +
                        " outside [1, " + std::to_string(d) + "]");
    }
    if (i > 0 && s >= elimination_schedule[i - 1]) {
      throw ConfigError("subset sizes must be strictly decreasing");
    }
  }
}

std::vector<int> default_schedule(int d) {
  if (d < 1) throw ConfigError("schedule needs d >= 1");
  std::vector<int> sizes;
  if (d <= 64) {
    for (int s = d; s >= 1; --s) sizes.push_back(s);
    return sizes;
  }
  constexpr int kCount = 32;
  sizes.resize(kCount);
  // Geometric targets d^(1 - i/31), lifted from the bottom so that all 32
  // sizes stay distinct where rounding would merge them.
  sizes[kCount - 1] = 1;
  for (int i = kCount - 2; i >= 0; --i) {
    const double target =
        std::pow(static_cast<double>(d),
                 1.0 - static_cast<double>(i) / (kCount - 1));
    sizes[static_cast<std::size_t>(i)] =
        std::max(static_cast<int>(std::lround(target)),
                 sizes[static_cast<std::size_t>(i) + 1] + 1);
  }
  sizes.front() = d;
  return sizes;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial, int subset_size,
                         bool paired) {
  const std::uint64_t counter =
      paired ? static_cast<std::uint64_t>(trial)
             : (static_cast<std::uint64_t>(subset_size) << 32) |
                   static_cast<std::uint64_t>(trial);
  return derive_seed(base_seed, kStreamSplit, counter);
}

EvalCurve backward_eliminate(const Dataset &ds, const FeatureRanking &ranking,
                             const EvalConfig &cfg) {
  const Eigen::Index d = ds.n_features();
  if (static_cast<Eigen::Index>(ranking.entries.size()) != d) {
    throw DataError("ranking has " + std::to_string(ranking.entries.size()) +
                    " features but the dataset has " + std::to_string(d));
  }
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (const auto &e : ranking.entries) {
    if (e.feature_index < 0 || e.feature_index >= d ||
        seen[static_cast<std::size_t>(e.feature_index)]) {
      throw DataError("ranking is not a permutation of the dataset features");
    }
    seen[static_cast<std::size_t>(e.feature_index)] = true;
  }
  cfg.validate(d);
  const std::vector<int> schedule =
      cfg.elimination_schedule.empty() ? default_schedule(static_cast<int>(d))
                                       : cfg.elimination_schedule;

  const auto n_trials = static_cast<std::size_t>(cfg.n_trials);
  std::vector<double> acc(schedule.size() * n_trials);
  std::vector<Eigen::Index> all_samples(static_cast<std::size_t>(ds.n_samples()));
  std::iota(all_samples.begin(), all_samples.end(), 0);

  parallel_for(acc.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t s_idx = job / n_trials;
    const int trial = static_cast<int>(job % n_trials);
    const int size = schedule[s_idx];
    std::vector<Eigen::Index> features;
    for (int r = 0; r < size; ++r) {
      features.push_back(ranking.entries[static_cast<std::size_t>(r)].feature_index);
    }
    const SplitIndices sp =
        split(ds, trial_seed(cfg.base_seed, trial, size, cfg.paired));
    const Dataset train = subset(ds, sp.train, features);
    const Dataset test = subset(ds, sp.test, features);

    std::vector<int> predicted;
    if (cfg.classifier == Classifier::Linear) {
      const LinearModel model = train_linear(
          train.features, one_hot(train.labels, ds.n_classes), cfg.ridge);
      predicted = model.predict(test.features);
    } else {
      const int k = std::min(cfg.knn_k, static_cast<int>(train.n_samples()));
      predicted = knn_predict(train.features, train.labels, test.features, k);
    }
    acc[job] = accuracy(predicted, test.labels);
  });

  EvalCurve curve;
  for (std::size_t s_idx = 0; s_idx < schedule.size(); ++s_idx) {
    const auto first = acc.begin() + static_cast<std::ptrdiff_t>(s_idx * n_trials);
    const auto last = first + static_cast<std::ptrdiff_t>(n_trials);
    const double mean =
        std::accumulate(first, last, 0.0) / static_cast<double>(n_trials);
    double var = 0.0;
    for (auto it = first; it != last; ++it) var += (*it - mean) * (*it - mean);
    var /= static_cast<double>(n_trials);
    curve.points.push_back({schedule[s_idx], mean, std::sqrt(var)});
  }
  const CurvePoint *best = &curve.points.front();
  for (const auto &pt : curve.points) {
    if (pt.mean_accuracy > best->mean_accuracy ||
        (pt.mean_accuracy == best->mean_accuracy &&
         pt.subset_size < best->subset_size)) {
      best = &pt;
    }
  }
  curve.best_size = best->subset_size;
  curve.best_accuracy = best->mean_accuracy;
  return curve;
}

}  // namespace polyfs
