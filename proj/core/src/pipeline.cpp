#include "autolabel/pipeline.hpp"

#include <chrono>

#include "autolabel/distance_score.hpp"
#include "autolabel/error.hpp"
#include "autolabel/geom/kdtree.hpp"
#include "autolabel/geom/normals.hpp"
#include "autolabel/region_score.hpp"
#include "autolabel/sectioning.hpp"

namespace autolabel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void score_section(const Scene& scene, const PipelineConfig& config, const SectionAssignment& assignment,
                   std::uint32_t m, ScoreComponents& out, SectionReport& rep, StageTimings& timings) {
  const PosedModel& model = scene.models[m - 1];
  Section sec = extract_section(scene.cloud, assignment, m);
  const std::size_t n = sec.cloud.size();
  rep.points = n;
  if (n == 0) {
    rep.empty = true;
    out.models.emplace_back();
    return;
  }
  const ClassId target = scene.registry.id(model.category);

  auto t0 = Clock::now();
  const KdTree tree(sec.cloud.points);
  std::vector<Point3> feet(n);
  std::vector<double> distances(n);
  for (std::size_t i = 0; i < n; ++i) {
    feet[i] = assignment.foot[sec.source_index[i]];
    distances[i] = assignment.distance[sec.source_index[i]];
  }
  RegionScoreField r_scores(n);
  RegionSegmentation seg;
  seg.region.assign(n, kUnassignedRegion);
  if (n < 3) {
    rep.too_small_for_regions = true;
  } else {
    const KnnGraph graph = build_knn_graph(tree, config.normal_neighbors, config.threads);
    NormalEstimate est = estimate_normals_and_curvature(sec.cloud, graph, config.threads);
    sec.cloud.normals = std::move(est.normals);
    timings.normals += seconds_since(t0);

    t0 = Clock::now();
    seg = adapt_and_grow(sec.cloud, est.curvatures, graph, config.region, config.adaptation);
    rep.regions = seg.region_count;
    rep.theta_deg = seg.theta_deg;
    rep.kappa = seg.kappa;
    rep.extra_iterations = seg.extra_iterations;
    rep.adaptation_flagged = seg.flagged;
  }
  const ObjectHull h_obj = build_h_obj(tree, feet);
  if (!rep.too_small_for_regions) r_scores = region_score(seg, sec.cloud, h_obj.hull);
  timings.regions += seconds_since(t0);

  t0 = Clock::now();
  const double radius = bounding_sphere_scaling(sec.cloud.points).radius;
  const DistanceThreshold th = adaptive_threshold(distances, r_scores, radius, config.threshold);
  rep.threshold = th.t;
  rep.threshold_fallback = th.used_fallback;
  rep.threshold_clamped = th.clamped;
  const std::vector<double> d_scores = distance_score(distances, th.t);
  timings.distance += seconds_since(t0);

  t0 = Clock::now();
  const TriangleMesh world = model.world_mesh();
  const ConvexHull3 h_mesh = build_h_mesh(world, config.training.hull_scale);
  const WeightedTrainingSet ts = build_training_set(sec.cloud, world, r_scores, h_obj.p_closest, h_mesh, distances,
                                                    splitmix64(config.seed + m), config.training);
  rep.training_object = ts.count(+1);
  rep.training_background = ts.count(-1);
  rep.background_fallback = ts.background_fallback;
  SvmModel svm = fit_svm(ts, config.svm);
  platt_calibrate(svm, ts);
  rep.support_vectors = svm.support_vectors.size();
  rep.svm_converged = svm.converged;
  rep.platt_fallback = svm.platt_fallback;
  const std::vector<double> s_scores = svm_score(svm, sec.cloud.points, config.threads);
  out.models.push_back(std::move(svm));
  timings.svm += seconds_since(t0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto dst = sec.source_index[i];
    out.target[dst] = target;
    out.region[dst] = r_scores[i];
    out.region_id[dst] = seg.region[i];
    out.distance[dst] = d_scores[i];
    out.svm[dst] = s_scores[i];
  }
}

}  // namespace

ScoreComponents compute_scores(const Scene& scene, const PipelineConfig& config, RunReport* report) {
  config.validate();
  if (scene.cloud.empty()) throw Error("scene has no points");
  if (scene.models.empty()) throw Error("scene has no models");
  RunReport local;
  RunReport& rep = report ? *report : local;
  rep.points = scene.cloud.size();
  rep.sections.clear();

  auto t0 = Clock::now();
  const std::vector<TriangleBvh> bvhs = build_model_bvhs(scene.models);
  const SectionAssignment assignment = split_into_sections(scene.cloud, bvhs, config.threads);
  rep.timings.sectioning += seconds_since(t0);

  const std::size_t n = scene.cloud.size();
  ScoreComponents out;
  out.section = assignment.section;
  out.target.assign(n, ClassRegistry::kBackground);
  out.region.assign(n, std::nullopt);
  out.region_id.assign(n, kUnassignedRegion);
  out.distance.assign(n, 0.0);
  out.raw_distance = assignment.distance;
  out.svm.assign(n, 0.0);

  for (std::uint32_t m = 1; m <= scene.models.size(); ++m) {
    SectionReport sr;
    sr.id = m;
    sr.category = scene.models[m - 1].category;
    try {
      score_section(scene, config, assignment, m, out, sr, rep.timings);
    } catch (const Error& e) {
      throw Error("section " + std::to_string(m) + " (" + sr.category + "): " + e.what());
    }
    if (sr.empty) rep.warnings.push_back("section " + std::to_string(m) + " (" + sr.category + ") attracted no points");
    if (sr.adaptation_flagged) {
      rep.warnings.push_back("section " + std::to_string(m) + ": region growing adaptation did not converge (" +
                             std::to_string(sr.regions) + " regions)");
    }
    if (sr.background_fallback) {
      rep.warnings.push_back("section " + std::to_string(m) + ": no background candidates, used farthest points");
    }
    rep.sections.push_back(std::move(sr));
  }
  return out;
}

ObjectScoreField fuse(const ScoreComponents& components, ScoreSubset subset) {
  const std::size_t n = components.target.size();
  ObjectScoreField f;
  f.target = components.target;
  f.region = components.region;
  f.distance = components.distance;
  f.svm = components.svm;
  f.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.c[i] = fuse_score(f.region[i], f.distance[i], f.svm[i], subset);
  return f;
}

void assemble_all(PipelineResult& result, const ClassRegistry& registry, const LabelThresholds& th) {
  result.hard = assemble_labels(result.scores, registry, LabelScheme::kHard, th);
  result.weak = assemble_labels(result.scores, registry, LabelScheme::kWeak, th);
  result.soft = assemble_labels(result.scores, registry, LabelScheme::kSoft, th);
}

PipelineResult run_pipeline(const Scene& scene, const PipelineConfig& config) {
  const auto start = Clock::now();
  PipelineResult result;
  result.components = compute_scores(scene, config, &result.report);
  auto t0 = Clock::now();
  result.scores = fuse(result.components, config.subset);
  result.report.timings.fusion = seconds_since(t0);
  t0 = Clock::now();
  assemble_all(result, scene.registry, config.labels);
  result.report.timings.labels = seconds_since(t0);
  result.report.timings.total = seconds_since(start);
  return result;
}

}  // namespace autolabel
