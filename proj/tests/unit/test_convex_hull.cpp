#include <random>

#include <gtest/gtest.h>

#include "autolabel/error.hpp"
#include "autolabel/geom/convex_hull.hpp"
#include "oracles.hpp"

using namespace autolabel;

TEST(ConvexHull, ContainmentMatchesSupportingPlaneBruteForce) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(-2, 2);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point3> pts(18);
    for (auto& p : pts) p = Point3(g(rng), g(rng), g(rng));
    const ConvexHull3 hull = convex_hull(pts);
    const auto planes = oracle::supporting_planes(pts);
    for (int probe = 0; probe < 100; ++probe) {
      const Point3 q(u(rng), u(rng), u(rng));
      // Skip probes that sit within tolerance of some facet.
      double margin = 1e300;
      for (const auto& pl : planes) margin = std::min(margin, std::abs(pl.n.dot(q) - pl.d));
      if (margin < 1e-7) continue;
      ++total;
      agree += hull.contains(q) == oracle::inside_planes(planes, q, 0.0);
    }
  }
  EXPECT_EQ(agree, total);
  EXPECT_GT(total, 950);
}

TEST(ConvexHull, ContainsEveryInputPoint) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point3> pts(500);
  for (auto& p : pts) p = Point3(u(rng), u(rng), u(rng));
  const auto hull = convex_hull(pts);
  for (const auto& p : pts) EXPECT_TRUE(hull.contains(p));
  EXPECT_FALSE(hull.degenerate());
  EXPECT_LE(hull.vertices().size(), pts.size());
}

TEST(ConvexHull, CubeVolumeAndFacets) {
  std::vector<Point3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  pts.emplace_back(0.5, 0.5, 0.5);  // interior
  pts.emplace_back(0.5, 0.5, 0.0);  // on a face
  const auto hull = convex_hull(pts);
  EXPECT_NEAR(hull.volume(), 1.0, 1e-12);
  EXPECT_EQ(hull.half_spaces().size(), 6u);  // coplanar facets merged
  EXPECT_TRUE(hull.contains(Point3(0.5, 0.5, 1.0)));
  EXPECT_FALSE(hull.contains(Point3(0.5, 0.5, 1.0 + 1e-6)));
}

TEST(ConvexHull, DegenerateInputsContainTheirPoints) {
  const std::vector<std::vector<Point3>> cases = {
      {Point3(1, 2, 3)},
      {Point3(0, 0, 0), Point3(1, 1, 1), Point3(2, 2, 2)},
      {Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(1, 1, 0), Point3(0.3, 0.3, 0)},
  };
  for (const auto& pts : cases) {
    const auto hull = convex_hull(pts);
    EXPECT_TRUE(hull.degenerate());
    for (const auto& p : pts) EXPECT_TRUE(hull.contains(p));
  }
  const auto planar = convex_hull(cases[2]);
  EXPECT_TRUE(planar.contains(Point3(0.5, 0.5, 0.5 * ConvexHull3::kDegenerateInflation)));
  EXPECT_FALSE(planar.contains(Point3(0.5, 0.5, 2 * ConvexHull3::kDegenerateInflation)));
}

TEST(ConvexHull, ScaleAboutVertexCentroid) {
  std::vector<Point3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const auto hull = convex_hull(pts);
  const auto big = scale_hull(hull, 1.5);
  EXPECT_NEAR(big.volume(), 1.5 * 1.5 * 1.5, 1e-9);
  EXPECT_TRUE(big.vertex_centroid().isApprox(hull.vertex_centroid()));
  EXPECT_TRUE(big.contains(Point3(1.24, 0.5, 0.5)));
  EXPECT_FALSE(big.contains(Point3(1.26, 0.5, 0.5)));
  for (const auto& p : pts) EXPECT_TRUE(big.contains(p));
  EXPECT_THROW(scale_hull(hull, 0.0), Error);
  EXPECT_THROW(scale_hull(hull, -1.0), Error);
}

TEST(ConvexHull, EmptyInputThrows) {
  std::vector<Point3> none;
  EXPECT_THROW(convex_hull(none), Error);
}

TEST(ConvexHull, ScaleMonotonicity) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0, 1);
  std::vector<Point3> pts(30);
  for (auto& p : pts) p = Point3(g(rng), g(rng), g(rng));
  const auto hull = convex_hull(pts);
  const std::vector<double> factors = {0.5, 1.0, 1.2, 1.5, 2.0};
  std::uniform_real_distribution<double> u(-5, 5);
  for (int probe = 0; probe < 2000; ++probe) {
    const Point3 q(u(rng), u(rng), u(rng));
    bool was_inside = false;
    for (double f : factors) {
      const bool inside = scale_hull(hull, f).contains(q);
      EXPECT_FALSE(was_inside && !inside) << "factor " << f;
      was_inside = inside;
    }
  }
}
