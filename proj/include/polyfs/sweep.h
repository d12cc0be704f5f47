#pragma once

#include <optional>
#include <vector>

#include "polyfs/stiefel.h"

namespace polyfs {

struct SimplexGrid {
  std::vector<SimplexWeights> points;
  double step = 0.0;
};

/// alpha and beta range over {0.01, step, 2 step, ...}; gamma = 1 - alpha -
/// beta, keeping only points with gamma >= 0.01.
SimplexGrid build_grid(double step = 0.05);

/// Area under the piecewise-linear descent curve with unit iteration spacing.
/// When `normalize` is set the curve is divided by f_0 first, which makes the
/// area invariant to the scale of the objective.
double curve_area(const DescentTrace &trace, bool normalize = true);

struct SweepPoint {
  SimplexWeights weights;
  double area = 0.0;
  bool converged = false;
  bool diverged = false;  // the run failed numerically; area is meaningless
  int iterations = 0;
  std::string failure;
};

struct SweepResult {
  std::vector<SweepPoint> per_point;
  std::size_t best = 0;
  StiefelPoint best_W;
  DescentTrace best_trace;
};

struct SweepOptions {
  bool normalize_curve = true;
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// Minimizes once per grid point from a shared starting point
/// init_stiefel(d, k, cfg.seed) and keeps the run with the smallest curve
/// area. Converged runs take precedence; ties go to fewer iterations, then to
/// the lexicographically smaller (alpha, beta, gamma).
SweepResult sweep(const CenteredProblem &p, const SimplexGrid &grid,
                  const SearchConfig &cfg, const SweepOptions &options = {});

}  // namespace polyfs
