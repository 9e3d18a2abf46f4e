#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace autolabel {

using Point3 = Eigen::Vector3d;
using Vector3 = Eigen::Vector3d;

/// Ground-truth / predicted class id; kUnlabeled marks points without a label.
using ClassId = std::uint16_t;
inline constexpr ClassId kUnlabeled = 65535;

/// Scan points with optional per-point normals and labels. Optional
/// attributes are absent when their vector is empty.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Vector3> normals;
  std::vector<ClassId> labels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_labels() const { return !labels.empty(); }

  /// Throws autolabel::Error if coordinates are non-finite, normals are not
  /// unit length (1e-6), or attribute sizes disagree with the point count.
  void validate() const;
};

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  double triangle_area(std::size_t t) const;
  double surface_area() const;

  /// Drops triangles with an out-of-range index or area <= 1e-12 m^2.
  /// Returns the number of triangles removed.
  std::size_t remove_degenerate(double min_area = 1e-12);

  void validate() const;
};

/// Similarity pose: world = translation + rotation * (scale .* local).
struct Pose {
  Vector3 translation = Vector3::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Vector3 scale = Vector3::Ones();

  Eigen::Matrix4d matrix() const;
  Point3 apply(const Point3& local) const;
  void validate() const;
};

/// A CAD mesh in its local frame plus its pose and semantic category.
struct PosedModel {
  TriangleMesh mesh;
  Pose pose;
  std::string category;

  /// Mesh with the pose baked into the vertices.
  TriangleMesh world_mesh() const;
};

}  // namespace autolabel
