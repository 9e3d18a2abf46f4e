#include "autolabel/ablation.hpp"

#include "autolabel/error.hpp"

namespace autolabel {

std::vector<AblationRow> run_ablation(std::span<const Scene> scenes, const PipelineConfig& config, std::size_t bins) {
  std::vector<ScoreComponents> components;
  components.reserve(scenes.size());
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    if (!scenes[s].cloud.has_labels()) throw Error("ablation scene " + std::to_string(s) + " has no ground truth");
    components.push_back(compute_scores(scenes[s], config));
  }
  const std::vector<double> edges = uniform_bin_edges(bins);
  std::vector<AblationRow> rows;
  for (ScoreSubset subset : kAllScoreSubsets) {
    std::vector<PipelineResult> results(scenes.size());
    std::vector<LabeledCloud> hard, weak;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      results[s].scores = fuse(components[s], subset);
      results[s].hard = assemble_labels(results[s].scores, scenes[s].registry, LabelScheme::kHard, config.labels);
      results[s].weak = assemble_labels(results[s].scores, scenes[s].registry, LabelScheme::kWeak, config.labels);
    }
    std::size_t classes = 0;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      const auto& cloud = scenes[s].cloud;
      classes = std::max(classes, scenes[s].registry.size());
      hard.push_back({cloud.points, results[s].hard.labels, cloud.labels, results[s].scores.c});
      weak.push_back({cloud.points, results[s].weak.labels, cloud.labels, {}});
    }
    AblationRow row;
    row.subset = subset;
    row.hard = evaluate_clouds(hard, classes, config.boundary_radius, edges);
    row.weak = evaluate_clouds(weak, classes, config.boundary_radius);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace autolabel
