#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyfs/error.h"
#include "polyfs/polygon.h"
#include "synthetic.h"

using namespace polyfs;

namespace {

// Shoelace area of a closed vertex list; independent of the trapezoid sum.
double shoelace(const std::vector<Vertex> &v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vertex &a = v[i];
    const Vertex &b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

QuadrantWeights from_rows(const Eigen::MatrixXd &M) { return {M}; }

}  // namespace

TEST(QuadrantProcess, AbsoluteValues) {
  Eigen::MatrixXd W(3, 2);
  W << 0.6, 0.0, -0.8, 0.0, 0.0, -1.0;
  const auto q = quadrant_process(StiefelPoint(W));
  EXPECT_TRUE(q.W_delta.isApprox(W.cwiseAbs()));
  EXPECT_GE(q.W_delta.minCoeff(), 0.0);
  // Column norms survive.
  for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(q.W_delta.col(j).norm(), 1.0, 1e-15);
}

TEST(BuildPolygon, VertexLayout) {
  Eigen::MatrixXd M(1, 3);
  M << 1.0, 2.0, 3.0;
  const auto poly = build_polygon(from_rows(M), 0);
  ASSERT_EQ(poly.vertices.size(), 5u);
  EXPECT_EQ(poly.vertices.front().x, 0.0);
  EXPECT_EQ(poly.vertices.front().y, 0.0);
  EXPECT_EQ(poly.vertices[2].x, 2.0);
  EXPECT_EQ(poly.vertices[2].y, 2.0);
  EXPECT_EQ(poly.vertices.back().x, 4.0);
  EXPECT_EQ(poly.vertices.back().y, 0.0);
  EXPECT_THROW(build_polygon(from_rows(M), 1), DataError);
  EXPECT_THROW(build_polygon(from_rows(M), -1), DataError);
}

TEST(PolygonArea, HandExamples) {
  Eigen::MatrixXd M(3, 3);
  M << 1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.25, 0.25, 0.0;
  const auto wq = from_rows(M);
  // 0.5 + 1.5 + 2.5 + 1.5
  EXPECT_EQ(polygon_area(build_polygon(wq, 0)), 6.0);
  EXPECT_EQ(polygon_area(build_polygon(wq, 1)), 0.0);
  EXPECT_EQ(polygon_area(build_polygon(wq, 2)), 0.5);
}

TEST(PolygonArea, EqualsRowSumAndShoelace) {
  for (int k : {2, 3, 4, 7}) {
    const Eigen::Index d = 12;
    const auto wq = quadrant_process(
        StiefelPoint(synth::random_orthonormal(d, k, static_cast<std::uint64_t>(k))));
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto poly = build_polygon(wq, i);
      const double area = polygon_area(poly);
      EXPECT_NEAR(area, wq.W_delta.row(i).sum(), 1e-12);
      EXPECT_NEAR(area, shoelace(poly.vertices), 1e-12);
    }
  }
}

TEST(PolygonArea, TotalBound) {
  // sum_i ||w_i||_1 <= sqrt(d) sum_j ||W_:j||_2 = k sqrt(d)
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::Index d = 15, k = 4;
    const auto wq = quadrant_process(StiefelPoint(synth::random_orthonormal(d, k, seed)));
    const auto ranking = rank_features(wq);
    double total = 0.0;
    for (const auto &e : ranking.entries) total += e.area;
    EXPECT_LE(total, k * std::sqrt(static_cast<double>(d)) + 1e-12);
  }
}

TEST(RankFeatures, OrderAndTies) {
  Eigen::MatrixXd M(2, 1);
  M << 1.0, 2.0;
  auto r = rank_features(from_rows(M));
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].feature_index, 1);
  EXPECT_EQ(r.entries[1].feature_index, 0);

  Eigen::MatrixXd T(4, 2);
  T << 0.5, 0.5, 1.0, 0.0, 0.0, 0.25, 0.0, 1.0;
  r = rank_features(from_rows(T));
  std::vector<Eigen::Index> order;
  for (const auto &e : r.entries) order.push_back(e.feature_index);
  EXPECT_EQ(order, (std::vector<Eigen::Index>{0, 1, 3, 2}));
}

TEST(RankFeatures, PermutationEquivariant) {
  const Eigen::Index d = 10;
  const Eigen::MatrixXd W = synth::random_orthonormal(d, 3, 77);
  std::vector<Eigen::Index> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[7]);
  Eigen::MatrixXd P(d, 3);
  for (Eigen::Index i = 0; i < d; ++i) P.row(i) = W.row(perm[i]);

  const auto base = rank_features(quadrant_process(StiefelPoint(W)));
  const auto permuted = rank_features(quadrant_process(StiefelPoint(P)));
  ASSERT_EQ(base.entries.size(), permuted.entries.size());
  for (std::size_t r = 0; r < base.entries.size(); ++r) {
    EXPECT_EQ(perm[permuted.entries[r].feature_index], base.entries[r].feature_index);
    EXPECT_EQ(permuted.entries[r].area, base.entries[r].area);
  }
}

TEST(RankFeatures, LargerWeightsRankHigher) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(5, 3, 0.1);
  M.row(3) *= 2.0;
  const auto r = rank_features(from_rows(M));
  EXPECT_EQ(r.entries.front().feature_index, 3);
  for (std::size_t i = 1; i < r.entries.size(); ++i)
    EXPECT_GE(r.entries[i - 1].area, r.entries[i].area);
}
