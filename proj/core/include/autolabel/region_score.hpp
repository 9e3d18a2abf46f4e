#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "autolabel/geom/convex_hull.hpp"
#include "autolabel/geom/kdtree.hpp"
#include "autolabel/geom/types.hpp"

namespace autolabel {

inline constexpr std::int32_t kUnassignedRegion = 0;

struct RegionGrowingParams {
  double theta_deg = 15.0;  // smoothness: max angle between neighboring normals
  double kappa = 0.05;      // curvature ceiling for a point to keep growing
  std::size_t min_region_size = 10;
};

struct RegionAdaptation {
  double tighten = 0.7;
  double loosen = 1.3;
  int max_iters = 8;
  /// Fragmentation cap is max(2, points / cap_divisor) regions.
  std::size_t cap_divisor = 20;
};

struct RegionSegmentation {
  /// 1-based region id per point, or kUnassignedRegion.
  std::vector<std::int32_t> region;
  std::size_t region_count = 0;
  double theta_deg = 0.0;
  double kappa = 0.0;
  /// Extra attempts made by adapt_and_grow beyond the first.
  int extra_iterations = 0;
  /// Set when adaptation could not reach 2 <= regions <= cap.
  bool flagged = false;
};

/// Curvature-ordered region growing over a k-NN graph. Requires section
/// normals; throws if they are missing.
RegionSegmentation grow_regions(const PointCloud& section, std::span<const double> curvatures,
                                const KnnGraph& graph, const RegionGrowingParams& params = {});

/// Retries grow_regions, tightening both constraints while fewer than two
/// regions come out and loosening them while the result is over-fragmented.
RegionSegmentation adapt_and_grow(const PointCloud& section, std::span<const double> curvatures,
                                  const KnnGraph& graph, const RegionGrowingParams& initial = {},
                                  const RegionAdaptation& adaptation = {});

/// Hull of the scan points the mesh "sees": for each mesh foot point take its
/// nearest section point, deduplicate, and hull the result.
struct ObjectHull {
  ConvexHull3 hull;
  std::vector<std::uint32_t> p_closest;  // indices into the section, ascending
};

/// `feet[i]` is the closest mesh point to section point i.
ObjectHull build_h_obj(const KdTree& section_index, std::span<const Point3> feet);
ObjectHull build_h_obj(const PointCloud& section, const PosedModel& model);

/// Per-point region score; std::nullopt marks points outside every region.
using RegionScoreField = std::vector<std::optional<double>>;

RegionScoreField region_score(const RegionSegmentation& segmentation, const PointCloud& section,
                              const ConvexHull3& h_obj);

}  // namespace autolabel
