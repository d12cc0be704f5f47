#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace polyfs {

/// Per-feature constants recorded by standardize().
struct Standardization {
  std::vector<double> means;
  std::vector<double> stds;  // population std; 0 for constant rows
};

/// Labelled samples stored feature-major: features is d x n.
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;                 // dense, in [0, n_classes)
  std::vector<std::string> feature_names;  // empty or size d
  std::vector<std::string> class_names;    // original label text per class
  int n_classes = 0;
  std::optional<Standardization> standardization;

  Eigen::Index n_features() const { return features.rows(); }
  Eigen::Index n_samples() const { return features.cols(); }

  /// Name of feature i, falling back to "f<i>".
  std::string feature_name(Eigen::Index i) const;
};

/// Throws DataError unless every Dataset invariant holds.
void validate(const Dataset &ds);

/// Builds a validated dataset from a d x n matrix and dense labels.
Dataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels,
                     std::vector<std::string> feature_names = {});

/// Column selector for the label: header name or zero-based index.
using LabelColumn = std::variant<std::string, int>;

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
};

/// Reads a rectangular table with one sample per row. Labels are remapped to
/// [0, k): numerically ordered when every label parses as a number,
/// lexicographically otherwise.
Dataset load_csv(const std::filesystem::path &path, const LabelColumn &label,
                 const CsvOptions &options = {});

/// Z-scores every feature row (population std). Constant rows become zero.
Dataset standardize(const Dataset &ds);

/// k x n indicator matrix; column j has a single 1 in row labels[j].
struct OneHotLabels {
  Eigen::MatrixXd matrix;
};

OneHotLabels one_hot(const Dataset &ds);
OneHotLabels one_hot(const std::vector<int> &labels, int n_classes);

struct SplitIndices {
  std::vector<Eigen::Index> train;  // ascending
  std::vector<Eigen::Index> test;   // ascending
  std::uint64_t seed = 0;
};

/// Stratified 70/30 holdout split; |train| = round(0.7 n) and every class
/// lands on both sides.
SplitIndices split(const Dataset &ds, std::uint64_t seed);

/// Restriction of ds to the given samples and feature rows (in the given
/// order). Labels keep the parent encoding.
Dataset subset(const Dataset &ds, const std::vector<Eigen::Index> &samples,
               const std::vector<Eigen::Index> &features);

/// JSON sidecar with the label mapping and standardization constants.
std::string metadata_json(const Dataset &ds);

}  // namespace polyfs
