#include "autolabel/io/reports.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace autolabel {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const std::optional<double>& v, int width = 8) {
  std::ostringstream ss;
  ss << std::setw(width);
  if (v) {
    ss << std::fixed << std::setprecision(2) << *v;
  } else {
    ss << "-";
  }
  return ss.str();
}

std::string class_name(const ClassRegistry& registry, std::size_t c) {
  return c < registry.size() ? registry.name(static_cast<ClassId>(c)) : "class" + std::to_string(c);
}

json metrics_json(const EvalReport& r) {
  return {{"clouds", r.clouds},
          {"oa", r.oa},
          {"macc", r.macc},
          {"mf1", r.mf1},
          {"miou", r.miou},
          {"miou_boundary", opt(r.miou_boundary)},
          {"miou_inner", opt(r.miou_inner)},
          {"pct_labeled", r.pct_labeled}};
}

}  // namespace

std::string eval_report_json(const EvalReport& r, const ClassRegistry& registry) {
  json doc = metrics_json(r);
  json bins = json::array();
  for (const auto& b : r.bins) {
    bins.push_back({{"lo", b.lo},
                    {"hi", b.hi},
                    {"points", b.points},
                    {"clouds", b.clouds},
                    {"accuracy", opt(b.mean_accuracy)},
                    {"std_error", opt(b.std_error)}});
  }
  doc["bins"] = bins;
  json names = json::array();
  json counts = json::array();
  json percent = json::array();
  for (std::size_t g = 0; g < r.confusion.classes; ++g) {
    names.push_back(class_name(registry, g));
    json crow = json::array();
    json prow = json::array();
    for (std::size_t p = 0; p < r.confusion.classes; ++p) {
      crow.push_back(r.confusion.at(g, p));
      prow.push_back(opt(r.confusion.row_percent(g, p)));
    }
    counts.push_back(crow);
    percent.push_back(prow);
  }
  doc["confusion"] = {{"classes", names}, {"counts", counts}, {"row_percent", percent}};
  return doc.dump(2);
}

void print_eval_report(std::ostream& out, const EvalReport& r, const ClassRegistry& registry) {
  out << "clouds        " << r.clouds << "\n";
  out << "OA            " << fmt(r.oa) << "\n";
  out << "mACC          " << fmt(r.macc) << "\n";
  out << "macro-F1      " << fmt(r.mf1) << "\n";
  out << "mIoU          " << fmt(r.miou) << "\n";
  out << "mIoU@boundary " << fmt(r.miou_boundary) << "\n";
  out << "mIoU@inner    " << fmt(r.miou_inner) << "\n";
  out << "% labeled     " << fmt(r.pct_labeled) << "\n";
  if (!r.bins.empty()) {
    out << "\nscore bin        points   acc(%)   stderr\n";
    for (const auto& b : r.bins) {
      std::ostringstream range;
      range << std::fixed << std::setprecision(2) << "[" << b.lo << ", " << b.hi << (b.hi >= 1.0 ? "]" : ")");
      out << std::left << std::setw(14) << range.str() << std::right << std::setw(9) << b.points << " "
          << fmt(b.mean_accuracy) << " " << fmt(b.std_error) << "\n";
    }
  }
  if (r.confusion.classes > 0) {
    out << "\nconfusion (row %, rows = ground truth)\n" << std::setw(14) << "";
    for (std::size_t p = 0; p < r.confusion.classes; ++p) out << std::setw(12) << class_name(registry, p).substr(0, 11);
    out << "\n";
    for (std::size_t g = 0; g < r.confusion.classes; ++g) {
      out << std::left << std::setw(14) << class_name(registry, g).substr(0, 13) << std::right;
      for (std::size_t p = 0; p < r.confusion.classes; ++p) out << "    " << fmt(r.confusion.row_percent(g, p));
      out << "\n";
    }
  }
}

std::string run_report_json(const RunReport& report, const PipelineConfig& config) {
  json doc;
  doc["points"] = report.points;
  doc["config"] = json::parse(config_to_json(config));
  const auto& t = report.timings;
  doc["timings_s"] = {{"sectioning", t.sectioning}, {"normals", t.normals}, {"regions", t.regions},
                      {"distance", t.distance},     {"svm", t.svm},         {"fusion", t.fusion},
                      {"labels", t.labels},         {"total", t.total}};
  json sections = json::array();
  for (const auto& s : report.sections) {
    sections.push_back({{"id", s.id},
                        {"category", s.category},
                        {"points", s.points},
                        {"empty", s.empty},
                        {"too_small_for_regions", s.too_small_for_regions},
                        {"regions", s.regions},
                        {"theta_deg", s.theta_deg},
                        {"kappa", s.kappa},
                        {"extra_iterations", s.extra_iterations},
                        {"adaptation_flagged", s.adaptation_flagged},
                        {"threshold", s.threshold},
                        {"threshold_fallback", s.threshold_fallback},
                        {"threshold_clamped", s.threshold_clamped},
                        {"training_object", s.training_object},
                        {"training_background", s.training_background},
                        {"background_fallback", s.background_fallback},
                        {"support_vectors", s.support_vectors},
                        {"svm_converged", s.svm_converged},
                        {"platt_fallback", s.platt_fallback}});
  }
  doc["sections"] = sections;
  doc["warnings"] = report.warnings;
  return doc.dump(2);
}

std::string ablation_json(const std::vector<AblationRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"scores", score_subset_name(r.subset)}, {"hard", metrics_json(r.hard)}, {"weak", metrics_json(r.weak)}});
  }
  return out.dump(2);
}

void print_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows) {
  out << std::left << std::setw(10) << "scores" << std::right;
  for (const char* h : {"OA", "mACC", "mF1", "mIoU", "@bound", "@inner", "weak OA", "weak mIoU", "%lab"}) {
    out << std::setw(10) << h;
  }
  out << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(10) << score_subset_name(r.subset) << std::right;
    for (const auto& v : {std::optional<double>(r.hard.oa), std::optional<double>(r.hard.macc),
                          std::optional<double>(r.hard.mf1), std::optional<double>(r.hard.miou), r.hard.miou_boundary,
                          r.hard.miou_inner, std::optional<double>(r.weak.oa), std::optional<double>(r.weak.miou),
                          std::optional<double>(r.weak.pct_labeled)}) {
      out << fmt(v, 10);
    }
    out << "\n";
  }
}

}  // namespace autolabel
