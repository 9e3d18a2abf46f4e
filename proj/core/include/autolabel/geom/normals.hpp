#pragma once

#include <vector>

#include "autolabel/geom/kdtree.hpp"
#include "autolabel/geom/types.hpp"

namespace autolabel {

inline constexpr std::size_t kDefaultNormalNeighbors = 16;

struct NormalEstimate {
  std::vector<Vector3> normals;
  /// Surface variation lambda0 / (lambda0 + lambda1 + lambda2), in [0, 1/3].
  std::vector<double> curvatures;
};

/// Local plane fit per point over its neighbor list (the point itself is
/// included). Normals are oriented consistently by breadth-first propagation
/// over the neighbor graph, one root per connected component.
NormalEstimate estimate_normals_and_curvature(const PointCloud& cloud, const KnnGraph& graph,
                                              int threads = 1);

/// Convenience overload that builds the k-NN graph itself. Throws when the
/// cloud has fewer than 3 points or k < 3.
NormalEstimate estimate_normals_and_curvature(const PointCloud& cloud,
                                              std::size_t k = kDefaultNormalNeighbors,
                                              int threads = 1);

}  // namespace autolabel
