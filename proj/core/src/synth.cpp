#include "autolabel/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "autolabel/error.hpp"
#include "autolabel/geom/convex_hull.hpp"
#include "autolabel/geom/sampling.hpp"

namespace autolabel {

const char* primitive_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::kBox:
      return "box";
    case PrimitiveKind::kCylinder:
      return "cylinder";
    case PrimitiveKind::kLShape:
      return "lshape";
    case PrimitiveKind::kMesh:
      return "mesh";
  }
  return "?";
}

PrimitiveKind parse_primitive(const std::string& name) {
  for (auto k : {PrimitiveKind::kBox, PrimitiveKind::kCylinder, PrimitiveKind::kLShape, PrimitiveKind::kMesh}) {
    if (name == primitive_name(k)) return k;
  }
  throw Error("unknown primitive '" + name + "' (expected box|cylinder|lshape|mesh)");
}

void SceneSpec::validate() const {
  if (density < 0 || noise_sigma < 0 || outlier_fraction < 0 || misalign_translation < 0 ||
      misalign_rotation_deg < 0 || misalign_scale < 0) {
    throw Error("scene densities, fractions and sigmas must be non-negative");
  }
  if (outlier_fraction >= 0.5) throw Error("outlier fraction must be below 0.5");
  if (floor_x < 0 || floor_y < 0 || wall_height < 0) throw Error("scene extents must be non-negative");
  if (walls < 0 || walls > 2) throw Error("walls must be 0, 1 or 2");
  for (const auto& o : objects) {
    if (o.category.empty()) throw Error("every object needs a category");
    if (o.kind != PrimitiveKind::kMesh && (o.size.array() < 0).any()) throw Error("object sizes must be non-negative");
  }
}

namespace {

TriangleMesh box_mesh(const Point3& lo, const Point3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  // Outward-facing quads split into triangles.
  const std::uint32_t quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                     {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh cylinder_mesh(double radius, double height, std::uint32_t segments = 32) {
  TriangleMesh m;
  m.vertices.emplace_back(0, 0, 0);
  m.vertices.emplace_back(0, 0, height);
  for (std::uint32_t s = 0; s < segments; ++s) {
    const double a = 2.0 * std::numbers::pi * s / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), height);
  }
  for (std::uint32_t s = 0; s < segments; ++s) {
    const std::uint32_t b0 = 2 + 2 * s, t0 = b0 + 1;
    const std::uint32_t b1 = 2 + 2 * ((s + 1) % segments), t1 = b1 + 1;
    m.triangles.push_back({0, b1, b0});
    m.triangles.push_back({1, t0, t1});
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
  }
  return m;
}

void append(TriangleMesh& dst, const TriangleMesh& src) {
  const auto base = static_cast<std::uint32_t>(dst.vertices.size());
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  for (const auto& t : src.triangles) dst.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

// Convex pieces whose union is the object solid.
std::vector<TriangleMesh> object_parts(const ObjectSpec& o) {
  const Vector3& s = o.size;
  switch (o.kind) {
    case PrimitiveKind::kBox:
      return {box_mesh(Point3(-s.x() / 2, -s.y() / 2, 0), Point3(s.x() / 2, s.y() / 2, s.z()))};
    case PrimitiveKind::kCylinder:
      return {cylinder_mesh(s.x(), s.z())};
    case PrimitiveKind::kLShape: {
      const double t = std::min({0.2, s.x() / 3.0, s.z() / 3.0});
      return {box_mesh(Point3(-s.x() / 2, -s.y() / 2, 0), Point3(s.x() / 2, s.y() / 2, t)),
              box_mesh(Point3(-s.x() / 2, -s.y() / 2, t), Point3(-s.x() / 2 + t, s.y() / 2, s.z()))};
    }
    case PrimitiveKind::kMesh:
      return {o.mesh};
  }
  return {};
}

Pose true_pose(const ObjectSpec& o) {
  Pose p;
  p.translation = o.position;
  p.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(o.yaw_deg * std::numbers::pi / 180.0, Vector3::UnitZ()));
  return p;
}

double footprint_radius(const ObjectSpec& o) {
  if (o.kind == PrimitiveKind::kCylinder) return o.size.x();
  return 0.5 * std::hypot(o.size.x(), o.size.y());
}

}  // namespace

TriangleMesh object_mesh(const ObjectSpec& object) {
  TriangleMesh out;
  for (const auto& part : object_parts(object)) append(out, part);
  return out;
}

SceneSpec random_scene_spec(std::uint64_t seed, SceneSpec base, const RandomLayout& layout) {
  if (layout.categories.empty()) throw Error("random layout needs at least one category");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  base.seed = seed;
  base.objects.clear();
  constexpr double kWallMargin = 0.3;
  constexpr double kGap = 0.25;
  const PrimitiveKind cycle[] = {PrimitiveKind::kBox, PrimitiveKind::kCylinder, PrimitiveKind::kLShape};
  for (std::size_t i = 0; i < layout.objects; ++i) {
    ObjectSpec o;
    o.kind = cycle[i % 3];
    o.category = layout.categories[i % layout.categories.size()];
    switch (o.kind) {
      case PrimitiveKind::kBox:
        o.size = Vector3(uniform(0.4, 1.1), uniform(0.4, 1.1), uniform(0.4, 1.1));
        break;
      case PrimitiveKind::kCylinder:
        o.size = Vector3(uniform(0.2, 0.45), 0.0, uniform(0.5, 1.2));
        break;
      default:
        o.size = Vector3(uniform(0.6, 1.1), uniform(0.4, 0.8), uniform(0.6, 1.2));
        break;
    }
    o.yaw_deg = uniform(0.0, 360.0);
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      if (attempt > 0 && attempt % 200 == 0) o.size *= 0.9;
      const double r = footprint_radius(o);
      const double hx = base.floor_x / 2 - kWallMargin - r;
      const double hy = base.floor_y / 2 - kWallMargin - r;
      if (hx <= 0 || hy <= 0) continue;
      o.position = Point3(uniform(-hx, hx), uniform(-hy, hy), 0.0);
      placed = true;
      for (const auto& other : base.objects) {
        if ((other.position - o.position).head<2>().norm() < r + footprint_radius(other) + kGap) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) throw Error("could not place object " + std::to_string(i) + " on the floor");
    base.objects.push_back(o);
  }
  return base;
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticScene scene;
  std::vector<Point3> pts;
  std::vector<ClassId> labels;

  // Convex solids in world frame, for occlusion and overlap tests.
  std::vector<ConvexHull3> solids;
  std::vector<std::vector<TriangleMesh>> world_parts(spec.objects.size());
  for (std::size_t o = 0; o < spec.objects.size(); ++o) {
    const ObjectSpec& obj = spec.objects[o];
    scene.registry.add(obj.category);
    PosedModel truth{object_mesh(obj), true_pose(obj), obj.category};
    for (const auto& part : object_parts(obj)) {
      PosedModel posed{part, truth.pose, obj.category};
      world_parts[o].push_back(posed.world_mesh());
      solids.push_back(convex_hull(world_parts[o].back().vertices));
    }
    scene.true_models.push_back(std::move(truth));
  }
  auto inside_solid = [&](const Point3& p, std::size_t skip_solid) {
    for (std::size_t k = 0; k < solids.size(); ++k) {
      if (k != skip_solid && solids[k].contains(p)) return true;
    }
    return false;
  };

  const double floor_z = 0.0;
  std::size_t solid_index = 0;
  for (std::size_t o = 0; o < spec.objects.size(); ++o) {
    const ClassId cls = scene.registry.id(spec.objects[o].category);
    for (const auto& part : world_parts[o]) {
      const std::size_t self = solid_index++;
      TriangleMesh visible;
      visible.vertices = part.vertices;
      for (std::size_t t = 0; t < part.triangles.size(); ++t) {
        const auto& tri = part.triangles[t];
        const Vector3 n = (part.vertices[tri[1]] - part.vertices[tri[0]])
                              .cross(part.vertices[tri[2]] - part.vertices[tri[0]]);
        bool on_floor = true;
        for (auto v : tri) on_floor = on_floor && part.vertices[v].z() <= floor_z + 1e-9;
        if (on_floor && n.z() < 0) continue;  // resting face, never scanned
        visible.triangles.push_back(tri);
      }
      const double area = visible.surface_area();
      const auto count = static_cast<std::size_t>(std::llround(spec.density * area));
      if (count == 0) continue;
      for (const auto& s : sample_surface(visible, count, rng())) {
        if (inside_solid(s.point, self)) continue;
        pts.push_back(s.point);
        labels.push_back(cls);
      }
    }
  }

  auto add_background_rect = [&](const Point3& origin, const Vector3& du, const Vector3& dv) {
    const double area = du.cross(dv).norm();
    const auto count = static_cast<std::size_t>(std::llround(spec.density * area));
    for (std::size_t i = 0; i < count; ++i) {
      const Point3 p = origin + unit(rng) * du + unit(rng) * dv;
      if (inside_solid(p, solids.size())) continue;
      pts.push_back(p);
      labels.push_back(ClassRegistry::kBackground);
    }
  };
  const double hx = spec.floor_x / 2;
  const double hy = spec.floor_y / 2;
  add_background_rect(Point3(-hx, -hy, floor_z), Vector3(spec.floor_x, 0, 0), Vector3(0, spec.floor_y, 0));
  if (spec.walls >= 1) {
    add_background_rect(Point3(-hx, hy, floor_z), Vector3(spec.floor_x, 0, 0), Vector3(0, 0, spec.wall_height));
  }
  if (spec.walls >= 2) {
    add_background_rect(Point3(-hx, -hy, floor_z), Vector3(0, spec.floor_y, 0), Vector3(0, 0, spec.wall_height));
  }
  if (pts.empty()) throw Error("scene spec has zero sampled surface area");

  if (spec.noise_sigma > 0) {
    for (auto& p : pts) p += spec.noise_sigma * Vector3(gauss(rng), gauss(rng), gauss(rng));
  }

  if (spec.outlier_fraction > 0) {
    const auto n_out = static_cast<std::size_t>(
        std::llround(spec.outlier_fraction / (1.0 - spec.outlier_fraction) * static_cast<double>(pts.size())));
    for (std::size_t i = 0; i < n_out; ++i) {
      pts.emplace_back(-hx + spec.floor_x * unit(rng), -hy + spec.floor_y * unit(rng),
                       floor_z + spec.wall_height * unit(rng));
      labels.push_back(ClassRegistry::kBackground);
    }
  }

  for (const auto& truth : scene.true_models) {
    PosedModel emitted = truth;
    if (spec.misalign_translation > 0) {
      emitted.pose.translation += spec.misalign_translation * Vector3(gauss(rng), gauss(rng), gauss(rng));
    }
    if (spec.misalign_rotation_deg > 0) {
      Vector3 axis(gauss(rng), gauss(rng), gauss(rng));
      axis = axis.norm() > 0 ? Vector3(axis.normalized()) : Vector3::UnitZ();
      const double angle = spec.misalign_rotation_deg * std::numbers::pi / 180.0 * gauss(rng);
      emitted.pose.rotation = (Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis)) * emitted.pose.rotation).normalized();
    }
    if (spec.misalign_scale > 0) {
      for (int k = 0; k < 3; ++k) emitted.pose.scale[k] *= std::max(0.1, 1.0 + spec.misalign_scale * gauss(rng));
    }
    scene.models.push_back(std::move(emitted));
  }

  scene.cloud.points = std::move(pts);
  scene.cloud.labels = std::move(labels);
  return scene;
}

}  // namespace autolabel
