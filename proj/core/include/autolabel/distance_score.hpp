#pragma once

#include <span>
#include <vector>

#include "autolabel/region_score.hpp"

namespace autolabel {

struct ThresholdOptions {
  /// Points with a region score strictly above this define t.
  double region_cut = 0.5;
  /// Percentile of all distances used when no point passes region_cut.
  double fallback_percentile = 0.9;
  /// Lower bound on t as a fraction of the section's bounding radius; keeps
  /// t > 0 when the confident points all lie exactly on the mesh.
  double min_fraction_of_radius = 1e-3;
};

struct DistanceThreshold {
  double t = 0.0;
  bool used_fallback = false;
  bool clamped = false;
};

/// t = max{ D(p) | R(p) > 0.5 }, with the percentile fallback described in
/// ThresholdOptions. `section_radius` scales the lower clamp. Throws on an
/// empty section.
DistanceThreshold adaptive_threshold(std::span<const double> distances,
                                     const RegionScoreField& r_scores, double section_radius,
                                     const ThresholdOptions& options = {});

/// 0 where D > t, 1 - D/t otherwise. Throws if t <= 0 or any D < 0.
double distance_score(double distance, double t);
std::vector<double> distance_score(std::span<const double> distances, double t);

}  // namespace autolabel
