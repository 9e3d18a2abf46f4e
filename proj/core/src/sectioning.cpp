#include "autolabel/sectioning.hpp"

#include <limits>
#include <string>

#include "autolabel/error.hpp"
#include "autolabel/parallel.hpp"

namespace autolabel {

std::vector<TriangleBvh> build_model_bvhs(std::span<const PosedModel> models) {
  std::vector<TriangleBvh> out;
  out.reserve(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    if (models[m].mesh.empty()) {
      throw Error("model " + std::to_string(m + 1) + " ('" + models[m].category + "') has an empty mesh");
    }
    out.emplace_back(models[m].world_mesh());
  }
  return out;
}

SectionAssignment split_into_sections(const PointCloud& cloud, std::span<const TriangleBvh> bvhs,
                                      int threads) {
  if (bvhs.empty()) throw Error("sectioning needs at least one model");
  if (cloud.empty()) throw Error("sectioning needs a non-empty point cloud");
  SectionAssignment out;
  out.model_count = bvhs.size();
  out.section.resize(cloud.size());
  out.distance.resize(cloud.size());
  out.foot.resize(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < bvhs.size(); ++m) {
      // Strictly closer only, so ties stay with the lower index.
      const ClosestPoint cp = bvhs[m].closest_within(cloud.points[i], best);
      if (cp.distance < best) {
        best = cp.distance;
        out.section[i] = static_cast<std::uint32_t>(m + 1);
        out.distance[i] = cp.distance;
        out.foot[i] = cp.foot;
      }
    }
  });
  return out;
}

SectionAssignment split_into_sections(const PointCloud& cloud, std::span<const PosedModel> models,
                                      int threads) {
  const auto bvhs = build_model_bvhs(models);
  return split_into_sections(cloud, bvhs, threads);
}

Section extract_section(const PointCloud& cloud, const SectionAssignment& assignment,
                        std::uint32_t m) {
  if (m < 1 || m > assignment.model_count) {
    throw Error("section " + std::to_string(m) + " out of range [1, " +
                std::to_string(assignment.model_count) + "]");
  }
  Section out;
  out.id = m;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (assignment.section[i] != m) continue;
    out.source_index.push_back(static_cast<std::uint32_t>(i));
    out.cloud.points.push_back(cloud.points[i]);
    if (cloud.has_normals()) out.cloud.normals.push_back(cloud.normals[i]);
    if (cloud.has_labels()) out.cloud.labels.push_back(cloud.labels[i]);
  }
  return out;
}

}  // namespace autolabel
