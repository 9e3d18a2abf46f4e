#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autolabel/geom/bvh.hpp"
#include "autolabel/geom/types.hpp"

namespace autolabel {

/// Per-point nearest-model assignment. Section ids are 1-based.
struct SectionAssignment {
  std::size_t model_count = 0;
  std::vector<std::uint32_t> section;
  std::vector<double> distance;
  std::vector<Point3> foot;
};

/// Builds one world-frame BVH per model. Throws, naming the model, if any
/// model has no triangles.
std::vector<TriangleBvh> build_model_bvhs(std::span<const PosedModel> models);

/// Assigns every point to its closest model surface; exact ties go to the
/// lowest model index.
SectionAssignment split_into_sections(const PointCloud& cloud, std::span<const TriangleBvh> bvhs,
                                      int threads = 1);
SectionAssignment split_into_sections(const PointCloud& cloud, std::span<const PosedModel> models,
                                      int threads = 1);

/// A sub-cloud plus the original index of each of its points.
struct Section {
  std::uint32_t id = 0;
  PointCloud cloud;
  std::vector<std::uint32_t> source_index;
};

/// Points whose section id equals `m` (1-based). Throws if m is out of range.
Section extract_section(const PointCloud& cloud, const SectionAssignment& assignment,
                        std::uint32_t m);

}  // namespace autolabel
