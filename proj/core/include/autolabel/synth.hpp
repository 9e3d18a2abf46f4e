#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autolabel/geom/types.hpp"
#include "autolabel/labeling.hpp"

namespace autolabel {

enum class PrimitiveKind : std::uint8_t { kBox, kCylinder, kLShape, kMesh };

const char* primitive_name(PrimitiveKind k);
PrimitiveKind parse_primitive(const std::string& name);

/// One object standing on the floor. `size` is (x, y, z) extent for boxes
/// and L-shapes, (radius, unused, height) for cylinders. For kMesh the local
/// mesh is used as-is (z up, base at z = 0).
struct ObjectSpec {
  PrimitiveKind kind = PrimitiveKind::kBox;
  std::string category;
  Vector3 size = Vector3(0.5, 0.5, 0.5);
  Point3 position = Point3::Zero();  // base center in world frame
  double yaw_deg = 0.0;
  TriangleMesh mesh;  // kMesh only
};

struct SceneSpec {
  std::vector<ObjectSpec> objects;
  double floor_x = 5.0;
  double floor_y = 5.0;
  int walls = 2;  // 0, 1 (+y side) or 2 (+y and -x sides)
  double wall_height = 2.5;
  double density = 1600.0;  // points per m^2
  double noise_sigma = 0.0;  // m, isotropic
  double outlier_fraction = 0.0;
  double misalign_translation = 0.0;  // m, per-axis sigma
  double misalign_rotation_deg = 0.0;
  double misalign_scale = 0.0;  // relative, per-axis sigma
  std::uint64_t seed = 42;

  void validate() const;
};

struct RandomLayout {
  std::size_t objects = 5;
  std::vector<std::string> categories{"crate", "drum", "bracket"};
};

/// Random non-overlapping layout of boxes, cylinders and L-shapes (cycled in
/// that order, one category each) on the floor of `base`.
SceneSpec random_scene_spec(std::uint64_t seed, SceneSpec base = {}, const RandomLayout& layout = {});

struct SyntheticScene {
  PointCloud cloud;                     // labels hold ground truth
  std::vector<PosedModel> models;       // perturbed poses, as a fitter would emit
  std::vector<PosedModel> true_models;  // poses used for sampling
  ClassRegistry registry;
};

/// Local-frame mesh of an object (base centered at the origin, z up).
TriangleMesh object_mesh(const ObjectSpec& object);

/// Samples the scene surfaces at the spec density. Ground truth follows the
/// sampled surface only; model poses are perturbed afterwards.
SyntheticScene generate_scene(const SceneSpec& spec);

}  // namespace autolabel
