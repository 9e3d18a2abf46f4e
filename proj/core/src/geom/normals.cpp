#include "autolabel/geom/normals.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <deque>

#include "autolabel/error.hpp"
#include "autolabel/parallel.hpp"

namespace autolabel {

NormalEstimate estimate_normals_and_curvature(const PointCloud& cloud, const KnnGraph& graph,
                                              int threads) {
  const std::size_t n = cloud.size();
  if (n < 3) throw Error("normal estimation needs at least 3 points");
  if (graph.neighbors.size() != n) throw Error("neighbor graph does not match the cloud");

  NormalEstimate out;
  out.normals.resize(n);
  out.curvatures.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& nbrs = graph.neighbors[i];
    Point3 mean = cloud.points[i];
    for (auto j : nbrs) mean += cloud.points[j];
    mean /= static_cast<double>(nbrs.size() + 1);
    Eigen::Matrix3d cov = (cloud.points[i] - mean) * (cloud.points[i] - mean).transpose();
    for (auto j : nbrs) {
      const Vector3 d = cloud.points[j] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d lambda = eig.eigenvalues().cwiseMax(0.0);  // ascending
    Vector3 normal = eig.eigenvectors().col(0);
    if (!(normal.squaredNorm() > 0.0)) normal = Vector3::UnitZ();
    out.normals[i] = normal.normalized();
    const double sum = lambda.sum();
    out.curvatures[i] = sum > 0.0 ? lambda[0] / sum : 0.0;
  });

  // Orientation: flood fill over the neighbor graph, flipping each newly
  // reached normal to agree with the normal it was reached from.
  std::vector<char> seen(n, 0);
  std::deque<std::uint32_t> queue;
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    queue.push_back(static_cast<std::uint32_t>(root));
    while (!queue.empty()) {
      const auto cur = queue.front();
      queue.pop_front();
      for (auto j : graph.neighbors[cur]) {
        if (seen[j]) continue;
        seen[j] = 1;
        if (out.normals[j].dot(out.normals[cur]) < 0.0) out.normals[j] = -out.normals[j];
        queue.push_back(j);
      }
    }
  }
  return out;
}

NormalEstimate estimate_normals_and_curvature(const PointCloud& cloud, std::size_t k, int threads) {
  if (k < 3) throw Error("normal estimation needs k >= 3");
  if (cloud.size() < 3) throw Error("normal estimation needs at least 3 points");
  const KdTree tree(cloud.points);
  return estimate_normals_and_curvature(cloud, build_knn_graph(tree, k, threads), threads);
}

}  // namespace autolabel
