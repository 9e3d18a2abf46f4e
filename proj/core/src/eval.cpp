#include "autolabel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autolabel/error.hpp"
#include "autolabel/geom/kdtree.hpp"

namespace autolabel {

std::uint64_t ConfusionMatrix::row_support(std::size_t gt) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < classes; ++p) s += at(gt, p);
  return s;
}

std::uint64_t ConfusionMatrix::col_support(std::size_t pred) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < classes; ++g) s += at(g, pred);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::optional<double> ConfusionMatrix::row_percent(std::size_t gt, std::size_t pred) const {
  const auto support = row_support(gt);
  if (support == 0) return std::nullopt;
  return 100.0 * static_cast<double>(at(gt, pred)) / static_cast<double>(support);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (classes == 0) {
    *this = other;
    return *this;
  }
  if (other.classes != classes) throw Error("cannot add confusion matrices of different size");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

ConfusionMatrix confusion_matrix(std::span<const ClassId> pred, std::span<const ClassId> gt,
                                 std::size_t num_classes) {
  if (pred.size() != gt.size()) {
    throw Error("prediction and ground truth differ in length (" + std::to_string(pred.size()) + " vs " +
                std::to_string(gt.size()) + ")");
  }
  ConfusionMatrix cm;
  cm.classes = num_classes;
  cm.counts.assign(num_classes * num_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == kUnlabeled || gt[i] == kUnlabeled) continue;
    if (pred[i] >= num_classes || gt[i] >= num_classes) {
      throw Error("label " + std::to_string(std::max(pred[i], gt[i])) + " at point " + std::to_string(i) +
                  " exceeds class count " + std::to_string(num_classes));
    }
    ++cm.counts[gt[i] * num_classes + pred[i]];
  }
  return cm;
}

std::optional<SegmentationMetrics> metrics_from_confusion(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) return std::nullopt;
  SegmentationMetrics m;
  m.evaluated = total;
  std::uint64_t diag = 0;
  double acc = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < cm.classes; ++c) {
    const auto tp = cm.at(c, c);
    const auto gt_support = cm.row_support(c);
    const auto pred_support = cm.col_support(c);
    diag += tp;
    if (gt_support == 0 && pred_support == 0) continue;
    ++included;
    const double fn = static_cast<double>(gt_support - tp);
    const double fp = static_cast<double>(pred_support - tp);
    const double t = static_cast<double>(tp);
    acc += gt_support ? t / static_cast<double>(gt_support) : 0.0;
    f1 += 2.0 * t / (2.0 * t + fp + fn);
    iou += t / (t + fp + fn);
  }
  m.oa = 100.0 * static_cast<double>(diag) / static_cast<double>(total);
  m.macc = 100.0 * acc / static_cast<double>(included);
  m.mf1 = 100.0 * f1 / static_cast<double>(included);
  m.miou = 100.0 * iou / static_cast<double>(included);
  return m;
}

std::optional<double> mean_iou(const ConfusionMatrix& cm) {
  if (auto m = metrics_from_confusion(cm)) return m->miou;
  return std::nullopt;
}

SegmentationMetrics segmentation_metrics(std::span<const ClassId> pred, std::span<const ClassId> gt,
                                         std::size_t num_classes) {
  auto m = metrics_from_confusion(confusion_matrix(pred, gt, num_classes));
  if (!m) throw Error("no labeled points to evaluate");
  return *m;
}

std::vector<char> boundary_mask(std::span<const Point3> points, std::span<const ClassId> gt, double radius) {
  if (points.size() != gt.size()) throw Error("points and ground truth differ in length");
  std::vector<char> mask(points.size(), 0);
  if (points.empty() || !(radius > 0.0)) return mask;
  const KdTree tree(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (gt[i] == kUnlabeled) continue;
    for (const auto& n : tree.radius(points[i], radius)) {
      const ClassId other = gt[n.index];
      if (other != kUnlabeled && other != gt[i]) {
        mask[i] = 1;
        break;
      }
    }
  }
  return mask;
}

SplitMetrics split_metrics(std::span<const ClassId> pred, std::span<const ClassId> gt,
                           std::span<const char> mask, std::size_t num_classes) {
  if (pred.size() != gt.size() || mask.size() != gt.size()) throw Error("split metric inputs differ in length");
  std::vector<ClassId> gt_b(gt.begin(), gt.end());
  std::vector<ClassId> gt_i(gt.begin(), gt.end());
  for (std::size_t i = 0; i < gt.size(); ++i) (mask[i] ? gt_i : gt_b)[i] = kUnlabeled;
  SplitMetrics out;
  out.boundary = mean_iou(confusion_matrix(pred, gt_b, num_classes));
  out.inner = mean_iou(confusion_matrix(pred, gt_i, num_classes));
  return out;
}

std::vector<double> uniform_bin_edges(std::size_t bins) {
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  return edges;
}

std::vector<ScoreBin> binned_accuracy(std::span<const BinInput> clouds, std::span<const double> edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw Error("bin edges must be ascending with at least two entries");
  }
  const std::size_t nb = edges.size() - 1;
  std::vector<ScoreBin> bins(nb);
  std::vector<std::vector<double>> per_cloud(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    bins[b].lo = edges[b];
    bins[b].hi = edges[b + 1];
  }
  for (const auto& cloud : clouds) {
    if (cloud.pred.size() != cloud.gt.size() || cloud.score.size() != cloud.gt.size()) {
      throw Error("binned accuracy inputs differ in length");
    }
    std::vector<std::uint64_t> hit(nb, 0);
    std::vector<std::uint64_t> seen(nb, 0);
    for (std::size_t i = 0; i < cloud.gt.size(); ++i) {
      if (cloud.gt[i] == kUnlabeled || cloud.pred[i] == kUnlabeled) continue;
      const double s = cloud.score[i];
      if (s < edges.front() || s > edges.back()) continue;
      auto it = std::upper_bound(edges.begin(), edges.end(), s);
      std::size_t b = static_cast<std::size_t>(it - edges.begin());
      b = b == 0 ? 0 : std::min(b - 1, nb - 1);
      ++seen[b];
      if (cloud.pred[i] == cloud.gt[i]) ++hit[b];
    }
    for (std::size_t b = 0; b < nb; ++b) {
      if (seen[b] == 0) continue;
      bins[b].points += seen[b];
      per_cloud[b].push_back(100.0 * static_cast<double>(hit[b]) / static_cast<double>(seen[b]));
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& v = per_cloud[b];
    bins[b].clouds = v.size();
    if (v.empty()) continue;
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double a : v) var += (a - mean) * (a - mean);
    bins[b].mean_accuracy = mean;
    bins[b].std_error = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) /
                                           std::sqrt(static_cast<double>(v.size()))
                                     : 0.0;
  }
  return bins;
}

CloudEvaluation evaluate_cloud(std::span<const Point3> points, std::span<const ClassId> pred,
                               std::span<const ClassId> gt, std::size_t num_classes, double boundary_radius) {
  CloudEvaluation out;
  out.confusion = confusion_matrix(pred, gt, num_classes);
  auto m = metrics_from_confusion(out.confusion);
  if (!m) throw Error("no labeled points to evaluate");
  out.metrics = *m;
  out.split = split_metrics(pred, gt, boundary_mask(points, gt, boundary_radius), num_classes);
  std::size_t labeled = 0;
  for (auto p : pred) labeled += p != kUnlabeled;
  out.pct_labeled = pred.empty() ? 0.0 : 100.0 * static_cast<double>(labeled) / static_cast<double>(pred.size());
  return out;
}

EvalReport aggregate(std::span<const CloudEvaluation> clouds) {
  EvalReport r;
  r.clouds = clouds.size();
  if (clouds.empty()) return r;
  double sb = 0.0, si = 0.0, pl = 0.0;
  std::size_t nb = 0, ni = 0;
  r.oa = r.macc = r.mf1 = r.miou = 0.0;
  for (const auto& c : clouds) {
    r.oa += c.metrics.oa;
    r.macc += c.metrics.macc;
    r.mf1 += c.metrics.mf1;
    r.miou += c.metrics.miou;
    pl += c.pct_labeled;
    if (c.split.boundary) {
      sb += *c.split.boundary;
      ++nb;
    }
    if (c.split.inner) {
      si += *c.split.inner;
      ++ni;
    }
    r.confusion += c.confusion;
  }
  const double n = static_cast<double>(clouds.size());
  r.oa /= n;
  r.macc /= n;
  r.mf1 /= n;
  r.miou /= n;
  r.pct_labeled = pl / n;
  if (nb) r.miou_boundary = sb / static_cast<double>(nb);
  if (ni) r.miou_inner = si / static_cast<double>(ni);
  return r;
}

EvalReport evaluate_clouds(std::span<const LabeledCloud> clouds, std::size_t num_classes, double boundary_radius,
                           std::span<const double> bin_edges) {
  std::vector<CloudEvaluation> evals;
  std::vector<BinInput> bins;
  evals.reserve(clouds.size());
  for (const auto& c : clouds) {
    evals.push_back(evaluate_cloud(c.points, c.pred, c.gt, num_classes, boundary_radius));
    if (!c.score.empty()) bins.push_back({c.pred, c.gt, c.score});
  }
  EvalReport r = aggregate(evals);
  if (!bin_edges.empty() && !bins.empty()) r.bins = binned_accuracy(bins, bin_edges);
  return r;
}

}  // namespace autolabel
