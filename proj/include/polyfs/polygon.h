#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polyfs/objective.h"

namespace polyfs {

/// Entrywise nonnegative copy of a weight matrix.
struct QuadrantWeights {
  Eigen::MatrixXd W_delta;  // d x k
};

/// Maps W into the first quadrant by taking |W_ij|.
QuadrantWeights quadrant_process(const StiefelPoint &W);

struct Vertex {
  double x = 0.0;
  double y = 0.0;
};

/// Piecewise-linear profile of one feature across the k class equations,
/// closed onto the x-axis: (0,0), (1,w_1), ..., (k,w_k), (k+1,0).
struct FeaturePolygon {
  Eigen::Index feature_index = 0;
  std::vector<Vertex> vertices;
};

FeaturePolygon build_polygon(const QuadrantWeights &wq, Eigen::Index feature);

/// Area between the polygon's upper boundary and the x-axis, integrated
/// segment by segment. With the zero anchors and unit spacing this equals the
/// row sum of W_delta.
double polygon_area(const FeaturePolygon &poly);

struct RankedFeature {
  Eigen::Index feature_index = 0;
  double area = 0.0;
};

/// Features by area, largest first; equal areas keep ascending index order.
struct FeatureRanking {
  std::vector<RankedFeature> entries;
};

FeatureRanking rank_features(const QuadrantWeights &wq);

}  // namespace polyfs
