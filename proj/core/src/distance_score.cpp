#include "autolabel/distance_score.hpp"

#include <algorithm>
#include <cmath>

#include "autolabel/error.hpp"

namespace autolabel {

DistanceThreshold adaptive_threshold(std::span<const double> distances,
                                     const RegionScoreField& r_scores, double section_radius,
                                     const ThresholdOptions& options) {
  if (distances.empty()) throw Error("adaptive threshold needs a non-empty section");
  if (r_scores.size() != distances.size()) throw Error("region scores do not match distances");

  DistanceThreshold out;
  bool any = false;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (r_scores[i] && *r_scores[i] > options.region_cut) {
      out.t = any ? std::max(out.t, distances[i]) : distances[i];
      any = true;
    }
  }
  if (!any) {
    std::vector<double> sorted(distances.begin(), distances.end());
    std::sort(sorted.begin(), sorted.end());
    const double rank = options.fallback_percentile * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    out.t = sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    out.used_fallback = true;
  }
  const double floor_t = options.min_fraction_of_radius * section_radius;
  if (out.t < floor_t || !(out.t > 0.0)) {
    out.t = floor_t > 0.0 ? floor_t : std::max(out.t, 1e-12);
    out.clamped = true;
  }
  return out;
}

double distance_score(double distance, double t) {
  if (!(t > 0.0)) throw Error("distance threshold must be positive");
  if (distance < 0.0) throw Error("distances must be non-negative");
  if (distance > t) return 0.0;
  return 1.0 - distance / t;
}

std::vector<double> distance_score(std::span<const double> distances, double t) {
  std::vector<double> out;
  out.reserve(distances.size());
  for (double d : distances) out.push_back(distance_score(d, t));
  return out;
}

}  // namespace autolabel
