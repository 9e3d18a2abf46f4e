#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autolabel/config.hpp"
#include "autolabel/geom/types.hpp"
#include "autolabel/labeling.hpp"
#include "autolabel/svm.hpp"

namespace autolabel {

struct Scene {
  PointCloud cloud;
  std::vector<PosedModel> models;
  ClassRegistry registry;
};

/// Per-section diagnostics. Section ids are 1-based, matching the models.
struct SectionReport {
  std::uint32_t id = 0;
  std::string category;
  std::size_t points = 0;
  bool empty = false;
  /// Fewer than 3 points: no normals, so no regions.
  bool too_small_for_regions = false;
  std::size_t regions = 0;
  double theta_deg = 0.0;
  double kappa = 0.0;
  int extra_iterations = 0;
  bool adaptation_flagged = false;
  double threshold = 0.0;
  bool threshold_fallback = false;
  bool threshold_clamped = false;
  std::size_t training_object = 0;
  std::size_t training_background = 0;
  bool background_fallback = false;
  std::size_t support_vectors = 0;
  bool svm_converged = false;
  bool platt_fallback = false;
};

/// Wall-clock seconds per stage, summed over sections.
struct StageTimings {
  double sectioning = 0.0;
  double normals = 0.0;
  double regions = 0.0;
  double distance = 0.0;
  double svm = 0.0;
  double fusion = 0.0;
  double labels = 0.0;
  double total = 0.0;
};

struct RunReport {
  std::size_t points = 0;
  std::vector<SectionReport> sections;
  StageTimings timings;
  std::vector<std::string> warnings;
};

/// Raw scores over the full cloud, before fusion.
struct ScoreComponents {
  std::vector<std::uint32_t> section;
  std::vector<ClassId> target;
  RegionScoreField region;
  std::vector<double> distance;  // normalized distance score
  std::vector<double> raw_distance;
  std::vector<double> svm;
  std::vector<std::int32_t> region_id;  // per-section region ids, for debugging
  std::vector<SvmModel> models;         // one per section, empty for empty sections
};

/// Sectioning plus region, distance and SVM scoring. Sections are handled in
/// order; per-point work inside a section uses config.threads. Results do not
/// depend on the thread count.
ScoreComponents compute_scores(const Scene& scene, const PipelineConfig& config, RunReport* report = nullptr);

ObjectScoreField fuse(const ScoreComponents& components, ScoreSubset subset);

struct PipelineResult {
  ScoreComponents components;
  ObjectScoreField scores;
  LabelSet hard;
  LabelSet weak;
  LabelSet soft;
  RunReport report;
};

PipelineResult run_pipeline(const Scene& scene, const PipelineConfig& config = {});

/// Labels all three schemes from an existing score field.
void assemble_all(PipelineResult& result, const ClassRegistry& registry, const LabelThresholds& th);

}  // namespace autolabel
