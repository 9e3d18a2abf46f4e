#include "autolabel/geom/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "autolabel/error.hpp"

namespace autolabel {

namespace {

constexpr std::uint32_t kLeafSize = 4;

double box_sq_distance(const Eigen::AlignedBox3d& box, const Point3& p) {
  return (p - p.cwiseMax(box.min()).cwiseMin(box.max())).squaredNorm();
}

}  // namespace

// Voronoi-region walk from Ericson, "Real-Time Collision Detection", 5.1.5.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c) {
  const Vector3 ab = b - a;
  const Vector3 ac = c - a;
  const Vector3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vector3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vector3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleBvh::TriangleBvh(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.empty()) throw Error("cannot query distances against a mesh without triangles");
  mesh_.validate();
  const auto n = static_cast<std::uint32_t>(mesh_.triangles.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  tri_boxes_.resize(n);
  centroids_.resize(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    const auto& tri = mesh_.triangles[t];
    Eigen::AlignedBox3d box;
    for (auto v : tri) box.extend(mesh_.vertices[v]);
    tri_boxes_[t] = box;
    centroids_[t] = box.center();
  }
  nodes_.reserve(2 * n / kLeafSize + 2);
  build(0, n);
}

std::int32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (auto i = begin; i < end; ++i) {
    box.extend(tri_boxes_[order_[i]]);
    centroid_box.extend(centroids_[order_[i]]);
  }
  nodes_[id].box = box;
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return centroids_[a][axis] < centroids_[b][axis] ||
                            (centroids_[a][axis] == centroids_[b][axis] && a < b);
                   });
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

ClosestPoint TriangleBvh::closest(const Point3& p) const {
  return closest_within(p, std::numeric_limits<double>::infinity());
}

ClosestPoint TriangleBvh::closest_within(const Point3& p, double upper_bound) const {
  ClosestPoint best;
  double best_sq = upper_bound * upper_bound;
  bool found = false;
  std::vector<std::pair<double, std::int32_t>> stack;
  stack.reserve(64);
  stack.emplace_back(box_sq_distance(nodes_[0].box, p), 0);
  while (!stack.empty()) {
    const auto [bound, id] = stack.back();
    stack.pop_back();
    if (bound > best_sq) continue;
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const auto t = order_[i];
        const auto& tri = mesh_.triangles[t];
        const Point3 q = closest_point_on_triangle(p, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                                   mesh_.vertices[tri[2]]);
        const double d2 = (q - p).squaredNorm();
        // Lowest triangle id wins ties so results do not depend on tree layout.
        if (d2 < best_sq || (d2 == best_sq && (!found || t < best.triangle))) {
          best_sq = d2;
          best.foot = q;
          best.triangle = t;
          found = true;
        }
      }
      continue;
    }
    const double dl = box_sq_distance(nodes_[node.left].box, p);
    const double dr = box_sq_distance(nodes_[node.right].box, p);
    if (dl <= dr) {
      stack.emplace_back(dr, node.right);
      stack.emplace_back(dl, node.left);
    } else {
      stack.emplace_back(dl, node.left);
      stack.emplace_back(dr, node.right);
    }
  }
  best.distance = found ? std::sqrt(best_sq) : std::numeric_limits<double>::infinity();
  return best;
}

ClosestPoint closest_point_on_mesh(const Point3& p, const PosedModel& model) {
  return TriangleBvh(model.world_mesh()).closest(p);
}

}  // namespace autolabel
