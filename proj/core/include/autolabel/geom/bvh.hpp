#pragma once

#include <cstdint>
#include <vector>

#include "autolabel/geom/types.hpp"

namespace autolabel {

struct ClosestPoint {
  double distance = 0.0;
  Point3 foot = Point3::Zero();
  std::uint32_t triangle = 0;
};

/// Exact closest point on triangle (a, b, c) to p.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c);

/// Axis-aligned bounding volume hierarchy over a world-frame triangle mesh,
/// answering exact unsigned point-to-surface distance queries.
class TriangleBvh {
 public:
  /// Throws autolabel::Error when the mesh has no triangles.
  explicit TriangleBvh(TriangleMesh mesh);

  const TriangleMesh& mesh() const { return mesh_; }

  ClosestPoint closest(const Point3& p) const;

  /// Same as closest(), but prunes subtrees farther than `upper_bound`.
  /// Returns distance = +inf when nothing lies within the bound.
  ClosestPoint closest_within(const Point3& p, double upper_bound) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  TriangleMesh mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Eigen::AlignedBox3d> tri_boxes_;
  std::vector<Point3> centroids_;
  std::vector<Node> nodes_;
};

/// One-shot query: poses the model, builds a BVH and returns the closest
/// surface point. Prefer a TriangleBvh for repeated queries.
ClosestPoint closest_point_on_mesh(const Point3& p, const PosedModel& model);

}  // namespace autolabel
