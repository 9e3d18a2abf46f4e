#include "autolabel/geom/types.hpp"

#include <cmath>
#include <string>

#include "autolabel/error.hpp"

namespace autolabel {

namespace {

bool finite(const Point3& p) { return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z()); }

}  // namespace

void PointCloud::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!finite(points[i])) throw Error("point " + std::to_string(i) + " has a non-finite coordinate");
  }
  if (!normals.empty()) {
    if (normals.size() != points.size()) throw Error("normal count does not match point count");
    for (std::size_t i = 0; i < normals.size(); ++i) {
      if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
        throw Error("normal " + std::to_string(i) + " is not unit length");
      }
    }
  }
  if (!labels.empty() && labels.size() != points.size()) {
    throw Error("label count does not match point count");
  }
}

double TriangleMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point3& a = vertices[tri[0]];
  return 0.5 * (vertices[tri[1]] - a).cross(vertices[tri[2]] - a).norm();
}

double TriangleMesh::surface_area() const {
  double area = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) area += triangle_area(t);
  return area;
}

std::size_t TriangleMesh::remove_degenerate(double min_area) {
  const std::size_t before = triangles.size();
  std::erase_if(triangles, [&](const std::array<std::uint32_t, 3>& tri) {
    for (auto v : tri) {
      if (v >= vertices.size()) return true;
    }
    const Point3& a = vertices[tri[0]];
    return 0.5 * (vertices[tri[1]] - a).cross(vertices[tri[2]] - a).norm() <= min_area;
  });
  return before - triangles.size();
}

void TriangleMesh::validate() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!finite(vertices[i])) throw Error("vertex " + std::to_string(i) + " has a non-finite coordinate");
  }
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (auto v : triangles[t]) {
      if (v >= vertices.size()) {
        throw Error("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                    " out of range");
      }
    }
  }
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix() * scale.asDiagonal();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Point3 Pose::apply(const Point3& local) const {
  return translation + rotation * scale.cwiseProduct(local);
}

void Pose::validate() const {
  if (std::abs(rotation.norm() - 1.0) > 1e-9) throw Error("pose rotation is not a unit quaternion");
  if ((scale.array() <= 0.0).any()) throw Error("pose scale factors must be positive");
  if (!finite(translation)) throw Error("pose translation is not finite");
}

TriangleMesh PosedModel::world_mesh() const {
  TriangleMesh out;
  out.triangles = mesh.triangles;
  out.vertices.reserve(mesh.vertices.size());
  const Eigen::Matrix3d linear = pose.rotation.toRotationMatrix() * pose.scale.asDiagonal();
  for (const auto& v : mesh.vertices) out.vertices.push_back(linear * v + pose.translation);
  return out;
}

}  // namespace autolabel
