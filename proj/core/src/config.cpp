#include "autolabel/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "autolabel/error.hpp"

namespace autolabel {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (!(region.theta_deg > 0.0 && region.theta_deg < 180.0)) throw Error("config: region.theta_deg must be in (0, 180)");
  if (!(region.kappa > 0.0)) throw Error("config: region.kappa must be positive");
  if (adaptation.max_iters < 1) throw Error("config: region.max_iters must be at least 1");
  if (!(adaptation.tighten > 0.0 && adaptation.tighten < 1.0)) throw Error("config: region.tighten must be in (0, 1)");
  if (!(adaptation.loosen > 1.0)) throw Error("config: region.loosen must exceed 1");
  if (adaptation.cap_divisor == 0) throw Error("config: region.cap_divisor must be positive");
  if (normal_neighbors < 3) throw Error("config: normals.neighbors must be at least 3");
  if (!(svm.C > 0.0)) throw Error("config: svm.C must be positive");
  if (svm.gamma && !(*svm.gamma > 0.0)) throw Error("config: svm.gamma must be positive or \"auto\"");
  if (!(svm.tol > 0.0)) throw Error("config: svm.tol must be positive");
  if (!(svm.cache_mb > 0.0)) throw Error("config: svm.cache_mb must be positive");
  if (training.per_class_cap == 0 || training.mesh_samples == 0) {
    throw Error("config: training sample counts must be positive");
  }
  if (!(training.hull_scale >= 1.0)) throw Error("config: training.hull_scale must be at least 1");
  if (!(training.fallback_fraction > 0.0 && training.fallback_fraction <= 1.0)) {
    throw Error("config: training.fallback_fraction must be in (0, 1]");
  }
  if (!(threshold.fallback_percentile >= 0.0 && threshold.fallback_percentile <= 1.0)) {
    throw Error("config: threshold.fallback_percentile must be in [0, 1]");
  }
  if (!(threshold.min_fraction_of_radius >= 0.0)) throw Error("config: threshold.min_fraction_of_radius must be >= 0");
  labels.validate();
  if (!(boundary_radius >= 0.0)) throw Error("config: boundary_radius must be non-negative");
  if (threads < 1) throw Error("config: threads must be at least 1");
}

namespace {

using Setter = std::function<void(const json&)>;

void apply_section(const json& obj, const std::string& where, const std::map<std::string, Setter>& setters) {
  if (!obj.is_object()) throw Error("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw Error("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw Error("config: bad value for '" + (where.empty() ? key : where + "." + key) + "': " + e.what());
    }
  }
}

template <typename T>
Setter set(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

}  // namespace

PipelineConfig config_from_json(const std::string& text, const PipelineConfig& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  PipelineConfig c = base;
  std::map<std::string, Setter> region{
      {"theta_deg", set(c.region.theta_deg)},     {"kappa", set(c.region.kappa)},
      {"min_region_size", set(c.region.min_region_size)}, {"max_iters", set(c.adaptation.max_iters)},
      {"tighten", set(c.adaptation.tighten)},     {"loosen", set(c.adaptation.loosen)},
      {"cap_divisor", set(c.adaptation.cap_divisor)}};
  std::map<std::string, Setter> normals{{"neighbors", set(c.normal_neighbors)}};
  std::map<std::string, Setter> svm{
      {"C", set(c.svm.C)},
      {"gamma",
       [&](const json& v) {
         if (v.is_string()) {
           if (v.get<std::string>() != "auto") throw Error("config: svm.gamma must be a number or \"auto\"");
           c.svm.gamma.reset();
         } else {
           c.svm.gamma = v.get<double>();
         }
       }},
      {"tol", set(c.svm.tol)},
      {"max_iterations", set(c.svm.max_iterations)},
      {"cache_mb", set(c.svm.cache_mb)}};
  std::map<std::string, Setter> training{
      {"mesh_samples", set(c.training.mesh_samples)}, {"per_class_cap", set(c.training.per_class_cap)},
      {"low_region_cut", set(c.training.low_region_cut)}, {"hull_scale", set(c.training.hull_scale)},
      {"fallback_fraction", set(c.training.fallback_fraction)}};
  std::map<std::string, Setter> threshold{
      {"region_cut", set(c.threshold.region_cut)},
      {"fallback_percentile", set(c.threshold.fallback_percentile)},
      {"min_fraction_of_radius", set(c.threshold.min_fraction_of_radius)}};
  std::map<std::string, Setter> labels{
      {"hard", set(c.labels.hard)}, {"weak_low", set(c.labels.weak_low)}, {"weak_high", set(c.labels.weak_high)}};
  std::map<std::string, Setter> top{
      {"region", [&](const json& v) { apply_section(v, "region", region); }},
      {"normals", [&](const json& v) { apply_section(v, "normals", normals); }},
      {"svm", [&](const json& v) { apply_section(v, "svm", svm); }},
      {"training", [&](const json& v) { apply_section(v, "training", training); }},
      {"threshold", [&](const json& v) { apply_section(v, "threshold", threshold); }},
      {"labels", [&](const json& v) { apply_section(v, "labels", labels); }},
      {"boundary_radius", set(c.boundary_radius)},
      {"scores", [&](const json& v) { c.subset = parse_score_subset(v.get<std::string>()); }},
      {"seed", set(c.seed)},
      {"threads", set(c.threads)}};
  apply_section(doc, "", top);
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, const PipelineConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(ss.str(), base);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const PipelineConfig& c) {
  json doc;
  doc["region"] = {{"theta_deg", c.region.theta_deg},       {"kappa", c.region.kappa},
                   {"min_region_size", c.region.min_region_size}, {"max_iters", c.adaptation.max_iters},
                   {"tighten", c.adaptation.tighten},       {"loosen", c.adaptation.loosen},
                   {"cap_divisor", c.adaptation.cap_divisor}};
  doc["normals"] = {{"neighbors", c.normal_neighbors}};
  doc["svm"] = {{"C", c.svm.C},
                {"gamma", c.svm.gamma ? json(*c.svm.gamma) : json("auto")},
                {"tol", c.svm.tol},
                {"max_iterations", c.svm.max_iterations},
                {"cache_mb", c.svm.cache_mb}};
  doc["training"] = {{"mesh_samples", c.training.mesh_samples},
                     {"per_class_cap", c.training.per_class_cap},
                     {"low_region_cut", c.training.low_region_cut},
                     {"hull_scale", c.training.hull_scale},
                     {"fallback_fraction", c.training.fallback_fraction}};
  doc["threshold"] = {{"region_cut", c.threshold.region_cut},
                      {"fallback_percentile", c.threshold.fallback_percentile},
                      {"min_fraction_of_radius", c.threshold.min_fraction_of_radius}};
  doc["labels"] = {{"hard", c.labels.hard}, {"weak_low", c.labels.weak_low}, {"weak_high", c.labels.weak_high}};
  doc["boundary_radius"] = c.boundary_radius;
  doc["scores"] = score_subset_name(c.subset);
  doc["seed"] = c.seed;
  doc["threads"] = c.threads;
  return doc.dump(2);
}

}  // namespace autolabel
