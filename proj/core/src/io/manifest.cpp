#include "autolabel/io/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "autolabel/error.hpp"
#include "autolabel/io/labels_io.hpp"
#include "autolabel/io/obj.hpp"
#include "autolabel/io/ply.hpp"

namespace autolabel {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Vector3 read_vec3(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) throw Error(what + " must be an array of 3 numbers");
  return Vector3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

ModelEntry read_model(const json& m, std::size_t index) {
  const std::string where = "models[" + std::to_string(index) + "]";
  if (!m.is_object()) throw Error(where + " must be an object");
  for (const auto& [key, _] : m.items()) {
    if (key != "mesh" && key != "category" && key != "translation" && key != "rotation" && key != "scale") {
      throw Error(where + ": unknown key '" + key + "'");
    }
  }
  if (!m.contains("mesh") || !m.contains("category")) throw Error(where + " needs 'mesh' and 'category'");
  ModelEntry e;
  e.mesh = m["mesh"].get<std::string>();
  e.category = m["category"].get<std::string>();
  if (e.category.empty()) throw Error(where + ": category must be non-empty");
  if (m.contains("translation")) e.pose.translation = read_vec3(m["translation"], where + ".translation");
  if (m.contains("rotation")) {
    const auto& q = m["rotation"];
    if (!q.is_array() || q.size() != 4) throw Error(where + ".rotation must be [w, x, y, z]");
    Eigen::Quaterniond rot(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
    const double norm = rot.norm();
    if (!(norm > 1e-12) || !std::isfinite(norm)) throw Error(where + ".rotation has zero norm");
    if (std::abs(norm - 1.0) > 1e-6) rot.normalize();
    e.pose.rotation = rot;
  }
  if (m.contains("scale")) {
    const auto& s = m["scale"];
    e.pose.scale = s.is_number() ? Vector3::Constant(s.get<double>()) : read_vec3(s, where + ".scale");
  }
  e.pose.validate();
  return e;
}

}  // namespace

SceneManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  SceneManifest m;
  try {
    if (!doc.is_object()) throw Error("manifest must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
      if (key != "cloud" && key != "gt_labels" && key != "classes" && key != "models") {
        throw Error("unknown key '" + key + "'");
      }
    }
    if (!doc.contains("cloud")) throw Error("missing 'cloud'");
    m.cloud = resolve(doc["cloud"].get<std::string>());
    if (doc.contains("gt_labels")) m.gt_labels = resolve(doc["gt_labels"].get<std::string>());
    if (doc.contains("classes")) m.classes = doc["classes"].get<std::vector<std::string>>();
    if (!doc.contains("models") || !doc["models"].is_array()) throw Error("missing 'models' array");
    for (std::size_t i = 0; i < doc["models"].size(); ++i) {
      ModelEntry e = read_model(doc["models"][i], i);
      e.mesh = resolve(e.mesh.string());
      m.models.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return m;
}

void write_manifest(const fs::path& path, const SceneManifest& m) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) { return p.is_absolute() ? p.lexically_relative(base).generic_string() : p.generic_string(); };
  json doc;
  doc["cloud"] = rel(m.cloud);
  if (m.gt_labels) doc["gt_labels"] = rel(*m.gt_labels);
  if (m.classes) doc["classes"] = *m.classes;
  doc["models"] = json::array();
  for (const auto& e : m.models) {
    const auto& q = e.pose.rotation;
    const auto& t = e.pose.translation;
    const auto& s = e.pose.scale;
    doc["models"].push_back({{"mesh", rel(e.mesh)},
                             {"category", e.category},
                             {"translation", {t.x(), t.y(), t.z()}},
                             {"rotation", {q.w(), q.x(), q.y(), q.z()}},
                             {"scale", {s.x(), s.y(), s.z()}}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

Scene load_scene(const fs::path& manifest_path) {
  const SceneManifest m = read_manifest(manifest_path);
  Scene scene;
  scene.cloud = read_point_cloud(m.cloud);
  for (const auto& e : m.models) {
    PosedModel model;
    model.mesh = read_mesh(e.mesh);
    model.pose = e.pose;
    model.category = e.category;
    scene.models.push_back(std::move(model));
  }
  if (m.classes) {
    scene.registry = ClassRegistry::from_names(*m.classes);
    for (const auto& e : m.models) {
      if (!scene.registry.find(e.category)) {
        throw Error(manifest_path.string() + ": category '" + e.category + "' is not in 'classes'");
      }
    }
  } else {
    for (const auto& e : m.models) scene.registry.add(e.category);
  }
  if (m.gt_labels) {
    LabelFile gt = read_label_ply(*m.gt_labels);
    if (gt.labels.size() != scene.cloud.size()) {
      throw Error(m.gt_labels->string() + ": " + std::to_string(gt.labels.size()) + " labels for " +
                  std::to_string(scene.cloud.size()) + " points");
    }
    scene.cloud.labels = std::move(gt.labels);
  }
  for (std::size_t i = 0; i < scene.cloud.labels.size(); ++i) {
    const auto l = scene.cloud.labels[i];
    if (l != kUnlabeled && l >= scene.registry.size()) {
      throw Error(manifest_path.string() + ": ground-truth label " + std::to_string(l) + " at point " +
                  std::to_string(i) + " is not a registered class");
    }
  }
  return scene;
}

fs::path write_scene(const fs::path& dir, const Scene& scene) {
  fs::create_directories(dir / "models");
  SceneManifest m;
  m.cloud = "cloud.ply";
  write_point_cloud(dir / m.cloud, scene.cloud);
  m.classes = scene.registry.names();
  for (std::size_t i = 0; i < scene.models.size(); ++i) {
    const auto& model = scene.models[i];
    ModelEntry e;
    e.mesh = fs::path("models") / ("model_" + std::to_string(i) + ".obj");
    e.category = model.category;
    e.pose = model.pose;
    write_obj(dir / e.mesh, model.mesh);
    m.models.push_back(std::move(e));
  }
  write_class_list(dir / "classes.txt", scene.registry);
  const fs::path manifest = dir / "manifest.json";
  write_manifest(manifest, m);
  return manifest;
}

}  // namespace autolabel
