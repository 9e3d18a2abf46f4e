#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "autolabel/geom/types.hpp"

namespace autolabel {

/// Plane n . x <= offset with unit outward normal n.
struct HalfSpace {
  Vector3 normal;
  double offset;

  double signed_distance(const Point3& p) const { return normal.dot(p) - offset; }
};

/// Closed convex polytope stored both as a triangulated boundary (for volume
/// and inspection) and as merged half-spaces (for containment).
class ConvexHull3 {
 public:
  static constexpr double kContainTolerance = 1e-9;
  static constexpr double kDegenerateInflation = 1e-4;

  ConvexHull3() = default;

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<HalfSpace>& half_spaces() const { return half_spaces_; }
  const std::vector<std::array<std::uint32_t, 3>>& facets() const { return facets_; }

  /// True when the input had rank < 3 and the hull was inflated.
  bool degenerate() const { return degenerate_; }

  bool contains(const Point3& p, double tolerance = kContainTolerance) const;
  double volume() const;
  Point3 vertex_centroid() const;

  /// Hull scaled by `factor` about the mean of its vertices.
  ConvexHull3 scaled(double factor) const;

 private:
  friend ConvexHull3 convex_hull(std::span<const Point3> points);

  std::vector<Point3> vertices_;
  std::vector<std::array<std::uint32_t, 3>> facets_;  // into vertices_
  std::vector<HalfSpace> half_spaces_;
  bool degenerate_ = false;
};

/// 3D convex hull. Rank-deficient input (coincident, collinear or coplanar
/// points) yields the lower-dimensional hull with every bounding plane pushed
/// outward by ConvexHull3::kDegenerateInflation. Throws on empty input.
ConvexHull3 convex_hull(std::span<const Point3> points);

inline bool hull_contains(const ConvexHull3& hull, const Point3& p) { return hull.contains(p); }

/// Throws autolabel::Error unless factor > 0.
ConvexHull3 scale_hull(const ConvexHull3& hull, double factor);

}  // namespace autolabel
