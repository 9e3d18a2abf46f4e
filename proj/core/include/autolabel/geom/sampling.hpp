#pragma once

#include <cstdint>
#include <vector>

#include "autolabel/geom/types.hpp"

namespace autolabel {

struct SurfaceSample {
  Point3 point;
  std::uint32_t triangle;
};

/// Area-weighted uniform samples from a world-frame mesh; deterministic for
/// a fixed seed.
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, std::size_t n,
                                          std::uint64_t seed);

/// Samples the posed model surface (world frame).
std::vector<Point3> sample_mesh_surface(const PosedModel& model, std::size_t n,
                                        std::uint64_t seed = 42);

}  // namespace autolabel
