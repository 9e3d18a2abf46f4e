#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "autolabel/ablation.hpp"
#include "autolabel/config.hpp"
#include "autolabel/error.hpp"
#include "autolabel/eval.hpp"
#include "autolabel/io/labels_io.hpp"
#include "autolabel/io/manifest.hpp"
#include "autolabel/io/ply.hpp"
#include "autolabel/io/reports.hpp"
#include "autolabel/io/scene_spec.hpp"
#include "autolabel/pipeline.hpp"
#include "autolabel/synth.hpp"
#include "autolabel/version.hpp"

namespace fs = std::filesystem;
using namespace autolabel;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> scores;
};

PipelineConfig resolve_config(const CommonOptions& o) {
  PipelineConfig cfg;
  std::string path = o.config;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  }
  if (!path.empty()) cfg = load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.scores) cfg.subset = parse_score_subset(*o.scores);
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text << "\n";
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON pipeline config (default: $AUTOLABEL_CONFIG)");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--scores", o.scores, "Score subset: all|dist|dist+reg|svm+reg");
}

void write_debug(const fs::path& dir, const Scene& scene, const PipelineResult& r) {
  const auto& comp = r.components;
  const std::size_t n = scene.cloud.size();
  auto col = [&](const char* name, PlyType type, auto&& get) {
    PlyColumn c{name, type, {}};
    c.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) c.values.push_back(get(i));
    return c;
  };
  std::vector<PlyColumn> extra;
  extra.push_back(col("section", PlyType::kUInt16, [&](std::size_t i) { return double(comp.section[i]); }));
  extra.push_back(col("region", PlyType::kInt32, [&](std::size_t i) { return double(comp.region_id[i]); }));
  extra.push_back(col("rscore", PlyType::kFloat32, [&](std::size_t i) { return comp.region[i].value_or(-1.0); }));
  extra.push_back(col("dscore", PlyType::kFloat32, [&](std::size_t i) { return comp.distance[i]; }));
  extra.push_back(col("svmscore", PlyType::kFloat32, [&](std::size_t i) { return comp.svm[i]; }));
  extra.push_back(col("c", PlyType::kFloat32, [&](std::size_t i) { return r.scores.c[i]; }));
  PointCloud pts;
  pts.points = scene.cloud.points;
  write_point_cloud(dir / "debug_scores.ply", pts, PlyFormat::kBinaryLittleEndian, std::move(extra));
  for (std::size_t m = 0; m < comp.models.size(); ++m) {
    if (comp.models[m].support_vectors.empty()) continue;
    std::ofstream out(dir / ("svm_section_" + std::to_string(m + 1) + ".txt"));
    write_svm_model(out, comp.models[m]);
  }
}

int cmd_label(const std::string& manifest, const std::string& out_dir, const std::string& scheme,
              const CommonOptions& common, bool debug, bool json_report) {
  if (scheme != "hard" && scheme != "weak" && scheme != "soft" && scheme != "all") {
    throw Error("--scheme must be hard, weak, soft or all");
  }
  const PipelineConfig cfg = resolve_config(common);
  const Scene scene = load_scene(manifest);
  const PipelineResult r = run_pipeline(scene, cfg);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const bool all = scheme == "all";
  if (all || scheme == "hard") write_label_ply(dir / "labels_hard.ply", scene.cloud, r.hard.labels, r.scores.c);
  if (all || scheme == "weak") write_label_ply(dir / "labels_weak.ply", scene.cloud, r.weak.labels, r.scores.c);
  if (all || scheme == "soft") {
    write_soft_labels(dir / "labels_soft.slbl", r.soft, scene.registry);
    write_soft_labels_csv(dir / "labels_soft.csv", r.soft, scene.registry);
  }
  write_class_list(dir / "classes.txt", scene.registry);
  const std::string report = run_report_json(r.report, cfg);
  write_text(dir / "run_report.json", report);
  if (debug) write_debug(dir, scene, r);
  if (json_report) {
    std::cout << report << "\n";
  } else {
    std::cout << "labeled " << scene.cloud.size() << " points in " << r.report.sections.size() << " sections ("
              << r.report.timings.total << " s), scores=" << score_subset_name(cfg.subset) << "\n";
    for (const auto& w : r.report.warnings) std::cout << "warning: " << w << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path, const std::string& cloud_path,
                 const std::string& classes_path, double radius, std::size_t bins, const std::string& out,
                 bool json_report) {
  const LabelFile pred = read_label_ply(pred_path);
  const LabelFile gt = read_label_ply(gt_path);
  const PointCloud cloud = read_point_cloud(cloud_path);
  if (pred.labels.size() != cloud.size() || gt.labels.size() != cloud.size()) {
    throw Error("pred, gt and cloud must have the same number of points");
  }
  ClassRegistry registry;
  std::size_t classes = 0;
  if (!classes_path.empty()) {
    registry = read_class_list(classes_path);
    classes = registry.size();
  } else {
    for (auto l : pred.labels) {
      if (l != kUnlabeled) classes = std::max<std::size_t>(classes, l + 1u);
    }
    for (auto l : gt.labels) {
      if (l != kUnlabeled) classes = std::max<std::size_t>(classes, l + 1u);
    }
  }
  const std::vector<double> edges = uniform_bin_edges(bins);
  const std::vector<double> no_score;
  const LabeledCloud lc{cloud.points, pred.labels, gt.labels, pred.score ? std::span<const double>(*pred.score)
                                                                         : std::span<const double>(no_score)};
  const EvalReport report = evaluate_clouds(std::span<const LabeledCloud>(&lc, 1), classes, radius, edges);
  const std::string text = eval_report_json(report, registry);
  write_text(out, text);
  if (json_report) {
    std::cout << text << "\n";
  } else {
    print_eval_report(std::cout, report, registry);
  }
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  SceneSpec spec = read_scene_spec(spec_path);
  if (seed) spec.seed = *seed;
  const SyntheticScene s = generate_scene(spec);
  Scene scene{s.cloud, s.models, s.registry};
  const fs::path manifest = write_scene(out_dir, scene);
  std::cout << "wrote " << s.cloud.size() << " points and " << s.models.size() << " models to " << manifest.string()
            << "\n";
  return 0;
}

std::vector<fs::path> read_manifest_list(const fs::path& list) {
  if (list.extension() == ".json") return {list};
  std::ifstream in(list);
  if (!in) throw Error("cannot open manifest list " + list.string());
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const fs::path p(line);
    out.push_back(p.is_absolute() ? p : list.parent_path() / p);
  }
  if (out.empty()) throw Error(list.string() + ": no manifests listed");
  return out;
}

int cmd_ablate(const std::string& list, bool gt_available, const std::string& out_dir, const CommonOptions& common,
               bool json_report) {
  if (!gt_available) throw Error("ablate compares against ground truth; pass --gt-available");
  const PipelineConfig cfg = resolve_config(common);
  std::vector<Scene> scenes;
  for (const auto& m : read_manifest_list(list)) {
    scenes.push_back(load_scene(m));
    if (!scenes.back().cloud.has_labels()) throw Error(m.string() + ": no ground-truth labels");
  }
  const auto rows = run_ablation(scenes, cfg);
  fs::create_directories(out_dir);
  const std::string text = ablation_json(rows);
  write_text(fs::path(out_dir) / "ablation.json", text);
  std::ostringstream table;
  print_ablation_table(table, rows);
  write_text(fs::path(out_dir) / "ablation.txt", table.str());
  if (json_report) {
    std::cout << text << "\n";
  } else {
    std::cout << table.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label point clouds from posed CAD models"};
  app.set_version_flag("--version", std::string("autolabel ") + kVersion);
  app.require_subcommand(1);
  bool json_report = false;
  app.add_flag("--json-report", json_report, "Print machine-readable JSON instead of text");

  CommonOptions label_opts;
  std::string manifest, label_out, scheme = "all";
  bool debug = false;
  auto* label = app.add_subcommand("label", "Score a scene and write hard, weak and soft labels");
  label->add_option("manifest", manifest, "Scene manifest (JSON)")->required();
  label->add_option("--out", label_out, "Output directory")->required();
  label->add_option("--scheme", scheme, "hard|weak|soft|all");
  label->add_flag("--debug-ply", debug, "Also write per-point scores and SVM dumps");
  add_common(label, label_opts);

  std::string pred, gt, cloud, classes, eval_out;
  double radius = kDefaultBoundaryRadius;
  std::size_t bins = 10;
  auto* evaluate = app.add_subcommand("evaluate", "Compare predicted labels with ground truth");
  evaluate->add_option("--pred", pred, "Predicted label PLY")->required();
  evaluate->add_option("--gt", gt, "Ground-truth label PLY")->required();
  evaluate->add_option("--cloud", cloud, "Point cloud PLY")->required();
  evaluate->add_option("--classes", classes, "Class list (one name per line)");
  evaluate->add_option("--boundary-radius", radius, "Boundary radius in meters")->check(CLI::NonNegativeNumber);
  evaluate->add_option("--bins", bins, "Object-score bins")->check(CLI::PositiveNumber);
  evaluate->add_option("--out", eval_out, "Report file (JSON)")->required();

  std::string spec, synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene bundle");
  synth->add_option("spec", spec, "Scene spec (JSON)")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the spec seed");

  CommonOptions ablate_opts;
  std::string list, ablate_out;
  bool gt_available = false;
  auto* ablate = app.add_subcommand("ablate", "Compare the four score subsets against ground truth");
  ablate->add_option("manifests", list, "Text file with one manifest path per line (or a single manifest)")
      ->required();
  ablate->add_flag("--gt-available", gt_available, "Manifests carry ground truth");
  ablate->add_option("--out", ablate_out, "Output directory")->required();
  add_common(ablate, ablate_opts);

  for (auto* sub : {label, evaluate, synth, ablate}) sub->add_flag("--json-report", json_report, "JSON output");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*label) return cmd_label(manifest, label_out, scheme, label_opts, debug, json_report);
    if (*evaluate) return cmd_evaluate(pred, gt, cloud, classes, radius, bins, eval_out, json_report);
    if (*synth) return cmd_synth(spec, synth_out, synth_seed);
    if (*ablate) return cmd_ablate(list, gt_available, ablate_out, ablate_opts, json_report);
  } catch (const std::exception& e) {
    std::cerr << "autolabel: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
