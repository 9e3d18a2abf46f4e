#include "autolabel/labeling.hpp"

#include <algorithm>
#include <string>

#include "autolabel/error.hpp"

namespace autolabel {

ClassRegistry::ClassRegistry() : names_{"background"} {}

ClassId ClassRegistry::add(std::string_view name) {
  if (name.empty()) throw Error("class names must be non-empty");
  if (auto found = find(name)) return *found;
  if (names_.size() >= kUnlabeled) throw Error("too many classes");
  names_.emplace_back(name);
  return static_cast<ClassId>(names_.size() - 1);
}

std::optional<ClassId> ClassRegistry::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ClassId>(it - names_.begin());
}

ClassId ClassRegistry::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error("unregistered category '" + std::string(name) + "'");
}

const std::string& ClassRegistry::name(ClassId id) const {
  if (id >= names_.size()) throw Error("class id " + std::to_string(id) + " out of range");
  return names_[id];
}

ClassRegistry ClassRegistry::from_names(std::span<const std::string> names) {
  if (names.empty() || names.front() != "background") {
    throw Error("class list must start with 'background'");
  }
  ClassRegistry r;
  for (std::size_t i = 1; i < names.size(); ++i) {
    if (r.find(names[i])) throw Error("duplicate class name '" + names[i] + "'");
    r.add(names[i]);
  }
  return r;
}

const char* score_subset_name(ScoreSubset s) {
  switch (s) {
    case ScoreSubset::kDist:
      return "dist";
    case ScoreSubset::kDistReg:
      return "dist+reg";
    case ScoreSubset::kSvmReg:
      return "svm+reg";
    case ScoreSubset::kAll:
      return "all";
  }
  return "?";
}

ScoreSubset parse_score_subset(std::string_view text) {
  for (auto s : kAllScoreSubsets) {
    if (text == score_subset_name(s)) return s;
  }
  throw Error("unknown score subset '" + std::string(text) + "' (expected dist|dist+reg|svm+reg|all)");
}

double fuse_score(std::optional<double> region, double distance, double svm, ScoreSubset subset) {
  const bool use_region = subset != ScoreSubset::kDist;
  const bool use_distance = subset != ScoreSubset::kSvmReg;
  const bool use_svm = subset == ScoreSubset::kSvmReg || subset == ScoreSubset::kAll;
  double sum = 0.0;
  int count = 0;
  if (use_region && region) {
    sum += *region;
    ++count;
  }
  if (use_distance) {
    sum += distance;
    ++count;
  }
  if (use_svm) {
    sum += svm;
    ++count;
  }
  if (count == 0) throw Error("no score defined for point");
  return sum / count;
}

ObjectScoreField fuse_scores(const RegionScoreField& r, std::span<const double> d,
                             std::span<const double> s, ClassId target, ScoreSubset subset) {
  if (r.size() != d.size() || d.size() != s.size()) throw Error("score fields differ in length");
  if (target == ClassRegistry::kBackground) throw Error("section target class cannot be background");
  ObjectScoreField out;
  out.region = r;
  out.distance.assign(d.begin(), d.end());
  out.svm.assign(s.begin(), s.end());
  out.target.assign(d.size(), target);
  out.c.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.c[i] = fuse_score(r[i], d[i], s[i], subset);
  return out;
}

const char* label_scheme_name(LabelScheme s) {
  switch (s) {
    case LabelScheme::kHard:
      return "hard";
    case LabelScheme::kWeak:
      return "weak";
    case LabelScheme::kSoft:
      return "soft";
  }
  return "?";
}

void LabelThresholds::validate() const {
  if (!(0.0 <= weak_low && weak_low < hard && hard < weak_high && weak_high <= 1.0)) {
    throw Error("label thresholds must satisfy 0 <= weak_low < hard < weak_high <= 1");
  }
}

std::size_t LabelSet::size() const {
  return scheme == LabelScheme::kSoft ? (class_count ? probabilities.size() / class_count : 0) : labels.size();
}

ClassId hard_label(double c, ClassId target, const LabelThresholds& th) {
  return c < th.hard ? ClassRegistry::kBackground : target;
}

ClassId weak_label(double c, ClassId target, const LabelThresholds& th) {
  if (c > th.weak_low && c < th.weak_high) return kUnlabeled;
  return hard_label(c, target, th);
}

namespace {

void write_point(LabelSet& out, std::size_t dst, double c, ClassId target, const LabelThresholds& th) {
  switch (out.scheme) {
    case LabelScheme::kHard:
      out.labels[dst] = hard_label(c, target, th);
      break;
    case LabelScheme::kWeak:
      out.labels[dst] = weak_label(c, target, th);
      break;
    case LabelScheme::kSoft: {
      double* row = out.probabilities.data() + dst * out.class_count;
      std::fill(row, row + out.class_count, 0.0);
      row[target] = c;
      row[ClassRegistry::kBackground] = 1.0 - c;
      break;
    }
  }
}

LabelSet empty_set(std::size_t n, const ClassRegistry& registry, LabelScheme scheme) {
  LabelSet out;
  out.scheme = scheme;
  out.class_count = registry.size();
  if (scheme == LabelScheme::kSoft) {
    out.probabilities.assign(n * registry.size(), 0.0);
  } else {
    out.labels.assign(n, kUnlabeled);
  }
  return out;
}

}  // namespace

LabelSet assemble_labels(std::span<const SectionScores> sections, std::size_t point_count,
                         const ClassRegistry& registry, LabelScheme scheme, const LabelThresholds& th) {
  th.validate();
  LabelSet out = empty_set(point_count, registry, scheme);
  std::vector<char> covered(point_count, 0);
  for (const auto& sec : sections) {
    const ObjectScoreField& f = *sec.scores;
    if (f.c.size() != sec.source_index.size()) throw Error("section scores do not match its index map");
    for (std::size_t i = 0; i < f.c.size(); ++i) {
      const auto dst = sec.source_index[i];
      if (dst >= point_count) throw Error("section index out of range");
      if (covered[dst]) throw Error("point " + std::to_string(dst) + " covered by two sections");
      if (f.target[i] >= registry.size() || f.target[i] == ClassRegistry::kBackground) {
        throw Error("section target class " + std::to_string(f.target[i]) + " is not registered");
      }
      covered[dst] = 1;
      write_point(out, dst, f.c[i], f.target[i], th);
    }
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw Error("some points are not covered by any section");
  }
  return out;
}

LabelSet assemble_labels(const ObjectScoreField& scores, const ClassRegistry& registry, LabelScheme scheme,
                         const LabelThresholds& th) {
  std::vector<std::uint32_t> identity(scores.c.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<std::uint32_t>(i);
  const SectionScores whole{&scores, identity};
  return assemble_labels(std::span<const SectionScores>(&whole, 1), scores.c.size(), registry, scheme, th);
}

}  // namespace autolabel
