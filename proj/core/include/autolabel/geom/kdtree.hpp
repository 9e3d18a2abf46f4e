#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autolabel/geom/types.hpp"

namespace autolabel {

struct Neighbor {
  std::uint32_t index;
  double sq_distance;
};

/// Exact k-d tree over a fixed set of 3D points. Results are sorted by
/// (distance, index), so equidistant neighbors come back in a stable order.
/// Immutable after construction; queries are thread-safe.
class KdTree {
 public:
  /// Throws autolabel::Error for an empty point set.
  explicit KdTree(std::span<const Point3> points, int leaf_size = 12);

  std::size_t size() const { return points_.size(); }
  const Point3& point(std::uint32_t i) const { return points_[i]; }

  std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;
  std::vector<Neighbor> radius(const Point3& query, double radius) const;
  Neighbor nearest(const Point3& query) const;

 private:
  struct Node {
    // Leaf when child[0] < 0: [begin, end) into order_.
    std::int32_t child[2] = {-1, -1};
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int leaf_size);

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// k-nearest-neighbor lists for every point of a cloud, excluding the point
/// itself. Row i holds up to k neighbor indices sorted by distance.
struct KnnGraph {
  std::size_t k = 0;
  std::vector<std::vector<std::uint32_t>> neighbors;
};

KnnGraph build_knn_graph(const KdTree& tree, std::size_t k, int threads = 1);

}  // namespace autolabel
