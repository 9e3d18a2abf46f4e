#include "autolabel/region_score.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "autolabel/error.hpp"
#include "autolabel/geom/bvh.hpp"

namespace autolabel {

RegionSegmentation grow_regions(const PointCloud& section, std::span<const double> curvatures,
                                const KnnGraph& graph, const RegionGrowingParams& params) {
  if (!section.has_normals()) {
    throw Error("region growing needs per-point normals; run estimate_normals_and_curvature first");
  }
  const std::size_t n = section.size();
  if (curvatures.size() != n || graph.neighbors.size() != n) {
    throw Error("curvature or neighbor data does not match the section size");
  }

  RegionSegmentation seg;
  seg.theta_deg = params.theta_deg;
  seg.kappa = params.kappa;
  seg.region.assign(n, kUnassignedRegion);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return curvatures[a] < curvatures[b]; });

  const double cos_theta = std::cos(params.theta_deg * std::numbers::pi / 180.0);
  constexpr std::int32_t kVisitedSmall = -1;
  std::int32_t next_id = 1;
  std::vector<std::uint32_t> members;
  std::vector<std::uint32_t> seeds;
  for (auto start : order) {
    if (seg.region[start] != kUnassignedRegion) continue;
    members.assign(1, start);
    seeds.assign(1, start);
    seg.region[start] = next_id;
    while (!seeds.empty()) {
      const auto s = seeds.back();
      seeds.pop_back();
      for (auto nb : graph.neighbors[s]) {
        if (seg.region[nb] != kUnassignedRegion) continue;
        if (std::abs(section.normals[s].dot(section.normals[nb])) < cos_theta) continue;
        seg.region[nb] = next_id;
        members.push_back(nb);
        if (curvatures[nb] <= params.kappa) seeds.push_back(nb);
      }
    }
    if (members.size() < params.min_region_size) {
      for (auto m : members) seg.region[m] = kVisitedSmall;
    } else {
      ++next_id;
    }
  }
  for (auto& r : seg.region) {
    if (r == kVisitedSmall) r = kUnassignedRegion;
  }
  seg.region_count = static_cast<std::size_t>(next_id - 1);
  return seg;
}

RegionSegmentation adapt_and_grow(const PointCloud& section, std::span<const double> curvatures,
                                  const KnnGraph& graph, const RegionGrowingParams& initial,
                                  const RegionAdaptation& adaptation) {
  const std::size_t cap = std::max<std::size_t>(2, section.size() / std::max<std::size_t>(adaptation.cap_divisor, 1));
  RegionGrowingParams params = initial;
  RegionSegmentation best;
  bool have_best = false;
  auto miss = [](std::size_t count) { return count > 2 ? count - 2 : 2 - count; };
  for (int iter = 0; iter < std::max(adaptation.max_iters, 1); ++iter) {
    RegionSegmentation seg = grow_regions(section, curvatures, graph, params);
    seg.extra_iterations = iter;
    const std::size_t count = seg.region_count;
    if (count >= 2 && count <= cap) return seg;
    if (!have_best || miss(count) < miss(best.region_count)) {
      best = std::move(seg);
      have_best = true;
    }
    const double factor = count < 2 ? adaptation.tighten : adaptation.loosen;
    params.theta_deg *= factor;
    params.kappa *= factor;
  }
  best.flagged = true;
  best.extra_iterations = std::max(adaptation.max_iters, 1) - 1;
  return best;
}

ObjectHull build_h_obj(const KdTree& section_index, std::span<const Point3> feet) {
  if (section_index.size() == 0) throw Error("cannot build the object hull of an empty section");
  ObjectHull out;
  std::vector<char> picked(section_index.size(), 0);
  for (const auto& foot : feet) picked[section_index.nearest(foot).index] = 1;
  std::vector<Point3> pts;
  for (std::uint32_t i = 0; i < picked.size(); ++i) {
    if (!picked[i]) continue;
    out.p_closest.push_back(i);
    pts.push_back(section_index.point(i));
  }
  out.hull = convex_hull(pts);
  return out;
}

ObjectHull build_h_obj(const PointCloud& section, const PosedModel& model) {
  if (section.empty()) throw Error("cannot build the object hull of an empty section");
  const TriangleBvh bvh(model.world_mesh());
  std::vector<Point3> feet;
  feet.reserve(section.size());
  for (const auto& p : section.points) feet.push_back(bvh.closest(p).foot);
  return build_h_obj(KdTree(section.points), feet);
}

RegionScoreField region_score(const RegionSegmentation& segmentation, const PointCloud& section,
                              const ConvexHull3& h_obj) {
  if (segmentation.region.size() != section.size()) {
    throw Error("segmentation does not match the section size");
  }
  std::vector<std::size_t> inside(segmentation.region_count + 1, 0);
  std::vector<std::size_t> total(segmentation.region_count + 1, 0);
  for (std::size_t i = 0; i < section.size(); ++i) {
    const auto r = segmentation.region[i];
    if (r == kUnassignedRegion) continue;
    ++total[r];
    if (h_obj.contains(section.points[i])) ++inside[r];
  }
  RegionScoreField out(section.size());
  for (std::size_t i = 0; i < section.size(); ++i) {
    const auto r = segmentation.region[i];
    if (r == kUnassignedRegion) continue;
    out[i] = static_cast<double>(inside[r]) / static_cast<double>(total[r]);
  }
  return out;
}

}  // namespace autolabel
