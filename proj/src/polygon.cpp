#include "polyfs/polygon.h"

#include <algorithm>
#include <string>

#include "polyfs/error.h"

namespace polyfs {

QuadrantWeights quadrant_process(const StiefelPoint &W) {
  return {W.matrix().cwiseAbs()};
}

FeaturePolygon build_polygon(const QuadrantWeights &wq, Eigen::Index feature) {
  if (feature < 0 || feature >= wq.W_delta.rows()) {
    throw DataError("feature index " + std::to_string(feature) +
                    " out of range [0, " + std::to_string(wq.W_delta.rows()) +
                    ")");
  }
  const Eigen::Index k = wq.W_delta.cols();
  FeaturePolygon poly;
  poly.feature_index = feature;
  poly.vertices.reserve(static_cast<std::size_t>(k + 2));
  poly.vertices.push_back({0.0, 0.0});
  for (Eigen::Index c = 0; c < k; ++c) {
    poly.vertices.push_back(
        {static_cast<double>(c + 1), wq.W_delta(feature, c)});
  }
  poly.vertices.push_back({static_cast<double>(k + 1), 0.0});
  return poly;
}

double polygon_area(const FeaturePolygon &poly) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < poly.vertices.size(); ++i) {
    const Vertex &a = poly.vertices[i];
    const Vertex &b = poly.vertices[i + 1];
    // Integral of the line through a and b over [a.x, b.x].
    area += 0.5 * (a.y + b.y) * (b.x - a.x);
  }
  return area;
}

FeatureRanking rank_features(const QuadrantWeights &wq) {
  FeatureRanking ranking;
  const Eigen::Index d = wq.W_delta.rows();
  ranking.entries.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    ranking.entries.push_back({j, polygon_area(build_polygon(wq, j))});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedFeature &a, const RankedFeature &b) {
                     return a.area > b.area;
                   });
  return ranking;
}

}  // namespace polyfs
