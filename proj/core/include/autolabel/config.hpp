#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "autolabel/distance_score.hpp"
#include "autolabel/geom/normals.hpp"
#include "autolabel/labeling.hpp"
#include "autolabel/region_score.hpp"
#include "autolabel/svm.hpp"

namespace autolabel {

struct PipelineConfig {
  RegionGrowingParams region;
  RegionAdaptation adaptation;
  std::size_t normal_neighbors = kDefaultNormalNeighbors;
  SvmParams svm;
  TrainingSetParams training;
  ThresholdOptions threshold;
  LabelThresholds labels;
  double boundary_radius = 0.1;
  ScoreSubset subset = ScoreSubset::kAll;
  std::uint64_t seed = 42;
  int threads = 1;

  /// Throws autolabel::Error naming the offending field.
  void validate() const;
};

/// JSON with optional sections "region", "normals", "svm", "training",
/// "threshold", "labels" and top-level "boundary_radius", "scores", "seed",
/// "threads". Missing keys keep their defaults; unknown keys are errors.
PipelineConfig config_from_json(const std::string& text, const PipelineConfig& base = {});
PipelineConfig load_config(const std::filesystem::path& path, const PipelineConfig& base = {});
std::string config_to_json(const PipelineConfig& config);

/// Environment variable that names a config file when --config is absent.
inline constexpr const char* kConfigEnvVar = "AUTOLABEL_CONFIG";

}  // namespace autolabel
