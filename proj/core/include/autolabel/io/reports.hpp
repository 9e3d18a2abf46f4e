#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "autolabel/ablation.hpp"
#include "autolabel/config.hpp"
#include "autolabel/eval.hpp"
#include "autolabel/labeling.hpp"
#include "autolabel/pipeline.hpp"

namespace autolabel {

/// Keys: clouds, oa, macc, mf1, miou, miou_boundary, miou_inner,
/// pct_labeled, bins, confusion. Undefined values are null.
std::string eval_report_json(const EvalReport& report, const ClassRegistry& registry);

/// Aligned text table of the headline metrics, bins and row-normalized
/// confusion matrix.
void print_eval_report(std::ostream& out, const EvalReport& report, const ClassRegistry& registry);

std::string run_report_json(const RunReport& report, const PipelineConfig& config);

std::string ablation_json(const std::vector<AblationRow>& rows);
void print_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows);

}  // namespace autolabel
