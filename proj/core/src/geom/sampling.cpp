#include "autolabel/geom/sampling.hpp"

#include <algorithm>
#include <random>

#include "autolabel/error.hpp"

namespace autolabel {

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, std::size_t n,
                                          std::uint64_t seed) {
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    total += mesh.triangle_area(t);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw Error("cannot sample a mesh with zero surface area");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SurfaceSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto t = static_cast<std::uint32_t>(it - cumulative.begin());
    double u = unit(rng);
    double v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& tri = mesh.triangles[t];
    const Point3& a = mesh.vertices[tri[0]];
    out.push_back({a + u * (mesh.vertices[tri[1]] - a) + v * (mesh.vertices[tri[2]] - a), t});
  }
  return out;
}

std::vector<Point3> sample_mesh_surface(const PosedModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("sample count must be at least 1");
  const auto samples = sample_surface(model.world_mesh(), n, seed);
  std::vector<Point3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.point);
  return out;
}

}  // namespace autolabel
