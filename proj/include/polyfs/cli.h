#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polyfs/data.h"
#include "polyfs/evaluation.h"
#include "polyfs/stiefel.h"

namespace polyfs::cli {

inline constexpr const char *kVersion = "0.1.0";

struct DataInput {
  std::filesystem::path path;
  std::string label_col = "-1";  // header name or integer index; -1 = last
  char delimiter = ',';
  bool has_header = true;
};

/// Optional overrides of SearchConfig defaults.
struct SearchOverrides {
  std::optional<double> eps_grad;
  std::optional<int> max_iters;
  std::optional<double> dt_init;
};

struct RankOptions {
  DataInput data;
  double grid_step = 0.05;
  SearchOverrides search;
  std::uint64_t seed = 0;
  bool normalize_curve = true;
  unsigned threads = 1;
  std::filesystem::path out = ".";
};

struct EvalOptions {
  DataInput data;
  std::filesystem::path ranking;
  int trials = 20;
  Classifier classifier = Classifier::Linear;
  int knn_k = 5;
  std::vector<int> sizes;  // empty = default schedule
  bool paired = true;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path out = ".";
};

struct TraceOptions {
  DataInput data;
  double alpha = 1.0 / 3;
  double beta = 1.0 / 3;
  double gamma = 1.0 / 3;
  SearchMode mode = SearchMode::Hybrid;
  SearchOverrides search;
  std::uint64_t seed = 0;
  bool normalize_curve = true;
  std::filesystem::path out = ".";
};

/// Loads, validates and standardizes the input table.
Dataset load_input(const DataInput &in);

/// Config used for the optimizer under a user seed. The initial point is
/// drawn from derive_seed(seed, kStreamInit, 0).
SearchConfig search_config(const SearchOverrides &overrides, std::uint64_t seed);

/// Each command writes its outputs plus <command>.manifest.json into `out`
/// and returns the list of files written.
std::vector<std::filesystem::path> cmd_rank(const RankOptions &opts);
std::vector<std::filesystem::path> cmd_eval(const EvalOptions &opts);
std::vector<std::filesystem::path> cmd_trace(const TraceOptions &opts);

/// Parses argv and dispatches. Returns the process exit code: 0 on success,
/// 2 I/O, 3 data validation, 4 numerical failure, 5 config or usage.
int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err);

/// Hex SHA-256 of the file contents.
std::string fingerprint(const std::filesystem::path &path);

}  // namespace polyfs::cli
