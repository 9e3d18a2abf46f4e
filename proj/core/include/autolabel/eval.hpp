#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "autolabel/geom/types.hpp"

namespace autolabel {

/// Rows are ground truth, columns are predictions. Points unlabeled on
/// either side are not counted.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(std::size_t gt, std::size_t pred) const { return counts[gt * classes + pred]; }
  std::uint64_t row_support(std::size_t gt) const;
  std::uint64_t col_support(std::size_t pred) const;
  std::uint64_t total() const;
  /// Row-normalized percentage; empty for rows without support.
  std::optional<double> row_percent(std::size_t gt, std::size_t pred) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

/// Throws on length mismatch or a label >= num_classes (other than kUnlabeled).
ConfusionMatrix confusion_matrix(std::span<const ClassId> pred, std::span<const ClassId> gt,
                                 std::size_t num_classes);

/// All values in percent. Class means skip classes absent from both gt and
/// pred; `evaluated` is the number of counted points.
struct SegmentationMetrics {
  double oa = 0.0;
  double macc = 0.0;
  double mf1 = 0.0;
  double miou = 0.0;
  std::uint64_t evaluated = 0;
};

/// Metrics from a confusion matrix; empty when it holds no points.
std::optional<SegmentationMetrics> metrics_from_confusion(const ConfusionMatrix& cm);
std::optional<double> mean_iou(const ConfusionMatrix& cm);

/// Throws if no point is evaluable.
SegmentationMetrics segmentation_metrics(std::span<const ClassId> pred, std::span<const ClassId> gt,
                                         std::size_t num_classes);

inline constexpr double kDefaultBoundaryRadius = 0.1;

/// True where some other labeled point within `radius` carries a different
/// ground-truth label. Unlabeled points are never boundary points.
std::vector<char> boundary_mask(std::span<const Point3> points, std::span<const ClassId> gt,
                                double radius = kDefaultBoundaryRadius);

struct SplitMetrics {
  std::optional<double> boundary;  // mIoU over boundary points
  std::optional<double> inner;     // mIoU over the rest
};

SplitMetrics split_metrics(std::span<const ClassId> pred, std::span<const ClassId> gt,
                           std::span<const char> mask, std::size_t num_classes);

struct ScoreBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t points = 0;
  std::size_t clouds = 0;  // clouds with at least one point in the bin
  std::optional<double> mean_accuracy;
  std::optional<double> std_error;
};

/// Per-cloud inputs to the score-binned accuracy table.
struct BinInput {
  std::span<const ClassId> pred;
  std::span<const ClassId> gt;
  std::span<const double> score;
};

/// `edges` sorted ascending; bins are [e_k, e_k+1) except the last, which is
/// closed. Accuracy is per cloud, then averaged with its standard error.
std::vector<ScoreBin> binned_accuracy(std::span<const BinInput> clouds, std::span<const double> edges);
std::vector<double> uniform_bin_edges(std::size_t bins);

struct CloudEvaluation {
  SegmentationMetrics metrics;
  SplitMetrics split;
  ConfusionMatrix confusion;
  double pct_labeled = 100.0;
};

/// Full per-cloud evaluation of one prediction against ground truth.
CloudEvaluation evaluate_cloud(std::span<const Point3> points, std::span<const ClassId> pred,
                               std::span<const ClassId> gt, std::size_t num_classes,
                               double boundary_radius = kDefaultBoundaryRadius);

/// Per-cloud-then-mean aggregate.
struct EvalReport {
  std::size_t clouds = 0;
  double oa = 0.0;
  double macc = 0.0;
  double mf1 = 0.0;
  double miou = 0.0;
  std::optional<double> miou_boundary;
  std::optional<double> miou_inner;
  double pct_labeled = 100.0;
  ConfusionMatrix confusion;  // summed counts
  std::vector<ScoreBin> bins;
};

EvalReport aggregate(std::span<const CloudEvaluation> clouds);

/// Predictions for one cloud; `score` may be empty, which skips binning.
struct LabeledCloud {
  std::span<const Point3> points;
  std::span<const ClassId> pred;
  std::span<const ClassId> gt;
  std::span<const double> score;
};

/// evaluate_cloud on each cloud, aggregate, and the binned-accuracy table
/// over the clouds that carry scores.
EvalReport evaluate_clouds(std::span<const LabeledCloud> clouds, std::size_t num_classes,
                           double boundary_radius = kDefaultBoundaryRadius,
                           std::span<const double> bin_edges = {});

}  // namespace autolabel
