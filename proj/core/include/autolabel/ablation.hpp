#pragma once

#include <span>
#include <vector>

#include "autolabel/config.hpp"
#include "autolabel/eval.hpp"
#include "autolabel/pipeline.hpp"

namespace autolabel {

struct AblationRow {
  ScoreSubset subset = ScoreSubset::kAll;
  EvalReport hard;
  EvalReport weak;
};

/// Scores every scene once, then fuses, labels and evaluates under each of
/// the four score subsets. Scenes need ground-truth labels. The result is
/// identical to separate label runs per subset, since only fusion differs.
std::vector<AblationRow> run_ablation(std::span<const Scene> scenes, const PipelineConfig& config,
                                      std::size_t bins = 10);

}  // namespace autolabel
