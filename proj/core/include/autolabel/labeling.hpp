#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autolabel/geom/types.hpp"
#include "autolabel/region_score.hpp"

namespace autolabel {

/// Ordered class names; id 0 is always "background".
class ClassRegistry {
 public:
  static constexpr ClassId kBackground = 0;

  ClassRegistry();

  /// Registers `name` if new and returns its id.
  ClassId add(std::string_view name);
  /// Throws autolabel::Error for unknown names.
  ClassId id(std::string_view name) const;
  std::optional<ClassId> find(std::string_view name) const;
  const std::string& name(ClassId id) const;
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  /// Registry with the given names in order; the first must be "background".
  static ClassRegistry from_names(std::span<const std::string> names);

 private:
  std::vector<std::string> names_;
};

/// Which scores enter the fused object score.
enum class ScoreSubset : std::uint8_t { kDist, kDistReg, kSvmReg, kAll };

const char* score_subset_name(ScoreSubset s);
/// Accepts "dist", "dist+reg", "svm+reg", "all".
ScoreSubset parse_score_subset(std::string_view text);
inline constexpr ScoreSubset kAllScoreSubsets[] = {ScoreSubset::kDist, ScoreSubset::kDistReg,
                                                   ScoreSubset::kSvmReg, ScoreSubset::kAll};

/// Mean of the scores selected by `subset` that are defined for the point.
double fuse_score(std::optional<double> region, double distance, double svm, ScoreSubset subset);

/// Per-point object score for one section (or a whole cloud).
struct ObjectScoreField {
  std::vector<double> c;
  std::vector<ClassId> target;
  RegionScoreField region;
  std::vector<double> distance;
  std::vector<double> svm;
};

/// Fuses per-point scores. Throws if the inputs differ in length.
ObjectScoreField fuse_scores(const RegionScoreField& r, std::span<const double> d,
                             std::span<const double> s, ClassId target,
                             ScoreSubset subset = ScoreSubset::kAll);

enum class LabelScheme : std::uint8_t { kHard, kWeak, kSoft };

const char* label_scheme_name(LabelScheme s);

struct LabelThresholds {
  double hard = 0.5;       // c < hard -> background
  double weak_low = 0.25;  // weak leaves weak_low < c < weak_high unlabeled
  double weak_high = 0.75;

  void validate() const;
};

struct LabelSet {
  LabelScheme scheme = LabelScheme::kHard;
  std::size_t class_count = 0;
  /// Hard/weak: one id per point (kUnlabeled for weak ambiguity).
  std::vector<ClassId> labels;
  /// Soft: row-major point x class probabilities.
  std::vector<double> probabilities;

  std::size_t size() const;
  std::span<const double> row(std::size_t i) const {
    return {probabilities.data() + i * class_count, class_count};
  }
};

ClassId hard_label(double c, ClassId target, const LabelThresholds& th = {});
ClassId weak_label(double c, ClassId target, const LabelThresholds& th = {});

/// A section's fused scores plus where its points live in the full cloud.
struct SectionScores {
  const ObjectScoreField* scores;
  std::span<const std::uint32_t> source_index;
};

/// Scatters per-section scores into one label set over `point_count`
/// points. Throws if a point is covered by zero or several sections.
LabelSet assemble_labels(std::span<const SectionScores> sections, std::size_t point_count,
                         const ClassRegistry& registry, LabelScheme scheme,
                         const LabelThresholds& th = {});

/// Same rule applied to an already scattered full-cloud score field.
LabelSet assemble_labels(const ObjectScoreField& scores, const ClassRegistry& registry,
                         LabelScheme scheme, const LabelThresholds& th = {});

}  // namespace autolabel
