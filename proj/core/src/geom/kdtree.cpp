#include "autolabel/geom/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "autolabel/error.hpp"
#include "autolabel/parallel.hpp"

namespace autolabel {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.index < b.index);
}

}  // namespace

KdTree::KdTree(std::span<const Point3> points, int leaf_size)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) throw Error("cannot build a spatial index over an empty point set");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / std::max(leaf_size, 1) + 1);
  build(0, static_cast<std::uint32_t>(points_.size()), std::max(leaf_size, 1));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, int leaf_size) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= static_cast<std::uint32_t>(leaf_size)) return id;

  Eigen::AlignedBox3d box;
  for (auto i = begin; i < end; ++i) box.extend(points_[order_[i]]);
  int axis = 0;
  box.sizes().maxCoeff(&axis);
  if (box.sizes()[axis] <= 0.0) return id;  // all coincident

  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis] ||
                            (points_[a][axis] == points_[b][axis] && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const auto left = build(begin, mid, leaf_size);
  const auto right = build(mid, end, leaf_size);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].child[0] = left;
  nodes_[id].child[1] = right;
  return id;
}

std::vector<Neighbor> KdTree::knn(const Point3& query, std::size_t k) const {
  k = std::min(k, points_.size());
  if (k == 0) return {};
  // Max-heap on (distance, index) holding the current best k.
  auto worse = [](const Neighbor& a, const Neighbor& b) { return closer(a, b); };
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> best(worse);

  struct Frame {
    std::int32_t node;
    double bound;
  };
  std::vector<Frame> stack{{0, 0.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (best.size() == k && f.bound > best.top().sq_distance) continue;
    const Node& node = nodes_[f.node];
    if (node.child[0] < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const Neighbor cand{order_[i], (points_[order_[i]] - query).squaredNorm()};
        if (best.size() < k) {
          best.push(cand);
        } else if (closer(cand, best.top())) {
          best.pop();
          best.push(cand);
        }
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    const int near = diff < 0.0 ? 0 : 1;
    // Far child first on the stack so the near child is visited first.
    stack.push_back({node.child[1 - near], std::max(f.bound, diff * diff)});
    stack.push_back({node.child[near], f.bound});
  }
  std::vector<Neighbor> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> KdTree::radius(const Point3& query, double radius) const {
  std::vector<Neighbor> out;
  if (radius < 0.0) return out;
  const double r2 = radius * radius;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.child[0] < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const double d2 = (points_[order_[i]] - query).squaredNorm();
        if (d2 <= r2) out.push_back({order_[i], d2});
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    if (diff < 0.0) {
      stack.push_back(node.child[0]);
      if (diff * diff <= r2) stack.push_back(node.child[1]);
    } else {
      stack.push_back(node.child[1]);
      if (diff * diff <= r2) stack.push_back(node.child[0]);
    }
  }
  std::sort(out.begin(), out.end(), closer);
  return out;
}

Neighbor KdTree::nearest(const Point3& query) const { return knn(query, 1).front(); }

KnnGraph build_knn_graph(const KdTree& tree, std::size_t k, int threads) {
  KnnGraph graph;
  graph.k = k;
  graph.neighbors.resize(tree.size());
  parallel_for(tree.size(), threads, [&](std::size_t i) {
    auto found = tree.knn(tree.point(static_cast<std::uint32_t>(i)), k + 1);
    auto& row = graph.neighbors[i];
    row.reserve(k);
    for (const auto& n : found) {
      if (n.index != i && row.size() < k) row.push_back(n.index);
    }
  });
  return graph;
}

}  // namespace autolabel
