#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autolabel/pipeline.hpp"

namespace autolabel {

struct ModelEntry {
  std::filesystem::path mesh;
  std::string category;
  Pose pose;
};

/// JSON scene manifest. Relative paths resolve against the manifest's
/// directory.
///
///   {
///     "cloud": "cloud.ply",
///     "gt_labels": "gt.ply",                    (optional)
///     "classes": ["background", "crate"],       (optional registry override)
///     "models": [
///       {"mesh": "models/crate.obj", "category": "crate",
///        "translation": [x, y, z], "rotation": [w, x, y, z],
///        "scale": [sx, sy, sz] or s}
///     ]
///   }
struct SceneManifest {
  std::filesystem::path cloud;
  std::optional<std::filesystem::path> gt_labels;
  std::optional<std::vector<std::string>> classes;
  std::vector<ModelEntry> models;
};

/// Parses and validates the manifest. Quaternions are renormalized; a
/// quaternion of (near) zero norm is an error.
SceneManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const SceneManifest& manifest);

/// Loads the cloud, meshes and registry. Ground truth (from "gt_labels" or a
/// "label" property of the cloud) lands in scene.cloud.labels.
Scene load_scene(const std::filesystem::path& manifest_path);

/// Writes cloud.ply (binary, with gt labels if present), one OBJ per model
/// under models/, classes.txt and manifest.json into `dir`. Returns the
/// manifest path.
std::filesystem::path write_scene(const std::filesystem::path& dir, const Scene& scene);

}  // namespace autolabel
