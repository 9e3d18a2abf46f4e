#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "autolabel/error.hpp"
#include "autolabel/eval.hpp"
#include "oracles.hpp"

using namespace autolabel;

TEST(Metrics, FourPointExample) {
  const std::vector<ClassId> gt = {0, 0, 1, 1};
  const std::vector<ClassId> pred = {0, 1, 1, 1};
  const auto m = segmentation_metrics(pred, gt, 2);
  EXPECT_NEAR(m.oa, 75.0, 1e-9);
  EXPECT_NEAR(m.macc, 75.0, 1e-9);
  EXPECT_NEAR(m.miou, 100.0 * (0.5 + 2.0 / 3.0) / 2.0, 1e-9);
  EXPECT_NEAR(m.miou, 58.33, 0.01);
  EXPECT_NEAR(m.mf1, 73.33, 0.01);
  EXPECT_EQ(m.evaluated, 4u);
}

TEST(Metrics, MatchNaiveCountingOnRandomLabels) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 5;
    std::uniform_int_distribution<int> lab(0, static_cast<int>(k) - 1);
    std::vector<ClassId> gt(500), pred(500);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      gt[i] = static_cast<ClassId>(lab(rng));
      pred[i] = rng() % 3 == 0 ? static_cast<ClassId>(lab(rng)) : gt[i];
      if (rng() % 17 == 0) pred[i] = kUnlabeled;
      if (rng() % 19 == 0) gt[i] = kUnlabeled;
    }
    const auto m = segmentation_metrics(pred, gt, k);
    const auto ref = oracle::naive_metrics(pred, gt, k);
    EXPECT_NEAR(m.oa, ref.oa, 1e-9);
    EXPECT_NEAR(m.macc, ref.macc, 1e-9);
    EXPECT_NEAR(m.mf1, ref.mf1, 1e-9);
    EXPECT_NEAR(m.miou, ref.miou, 1e-9);
    const auto cm = confusion_matrix(pred, gt, k);
    for (std::size_t g = 0; g < k; ++g)
      for (std::size_t p = 0; p < k; ++p) EXPECT_EQ(cm.at(g, p), ref.confusion[g][p]);
  }
}

TEST(Metrics, OrderingInvariants) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ClassId> gt(200), pred(200);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      gt[i] = static_cast<ClassId>(rng() % 4);
      pred[i] = rng() % 2 ? gt[i] : static_cast<ClassId>(rng() % 4);
    }
    const auto cm = confusion_matrix(pred, gt, 4);
    const auto m = *metrics_from_confusion(cm);
    EXPECT_LE(m.miou, m.mf1 + 1e-9);
    for (std::size_t c = 0; c < 4; ++c) {
      const double tp = static_cast<double>(cm.at(c, c));
      const double rs = static_cast<double>(cm.row_support(c)), cs = static_cast<double>(cm.col_support(c));
      if (rs + cs == 0) continue;
      const double iou = tp / (rs + cs - tp), f1 = 2 * tp / (rs + cs);
      const double p = cs ? tp / cs : 0, r = rs ? tp / rs : 0;
      EXPECT_LE(iou, f1 + 1e-12);
      EXPECT_LE(f1, std::max(p, r) + 1e-12);
    }
    for (double v : {m.oa, m.macc, m.mf1, m.miou}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }
  }
}

TEST(Metrics, PermutationInvariance) {
  std::mt19937_64 rng(7);
  std::vector<ClassId> gt(300), pred(300);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    gt[i] = static_cast<ClassId>(rng() % 3);
    pred[i] = static_cast<ClassId>(rng() % 3);
  }
  const auto a = segmentation_metrics(pred, gt, 3);
  std::vector<std::size_t> perm(gt.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<ClassId> gt2, pred2;
  for (auto i : perm) {
    gt2.push_back(gt[i]);
    pred2.push_back(pred[i]);
  }
  const auto b = segmentation_metrics(pred2, gt2, 3);
  EXPECT_DOUBLE_EQ(a.oa, b.oa);
  EXPECT_DOUBLE_EQ(a.miou, b.miou);
  EXPECT_DOUBLE_EQ(a.mf1, b.mf1);
}

TEST(Metrics, PerfectPredictionIsHundred) {
  const std::vector<ClassId> gt = {0, 1, 2, 2, 1, 0, 3};
  const auto m = segmentation_metrics(gt, gt, 4);
  EXPECT_DOUBLE_EQ(m.oa, 100.0);
  EXPECT_DOUBLE_EQ(m.macc, 100.0);
  EXPECT_DOUBLE_EQ(m.mf1, 100.0);
  EXPECT_DOUBLE_EQ(m.miou, 100.0);
}

TEST(Metrics, AbsentClassesAreSkipped) {
  // Class 2 absent from both sides; class 3 predicted but absent from gt.
  const std::vector<ClassId> gt = {0, 0, 1, 1};
  const std::vector<ClassId> pred = {0, 0, 1, 3};
  const auto m = segmentation_metrics(pred, gt, 4);
  EXPECT_NEAR(m.miou, 100.0 * (1.0 + 0.5 + 0.0) / 3.0, 1e-9);
}

TEST(Metrics, InvalidInputThrows) {
  const std::vector<ClassId> a = {0, 1};
  const std::vector<ClassId> b = {0};
  EXPECT_THROW(segmentation_metrics(a, b, 2), Error);
  const std::vector<ClassId> c = {0, 5};
  EXPECT_THROW(segmentation_metrics(c, a, 2), Error);
  const std::vector<ClassId> none = {kUnlabeled, kUnlabeled};
  EXPECT_THROW(segmentation_metrics(none, a, 2), Error);
}

TEST(Boundary, StripAroundClassInterface) {
  // A line of points at 13 mm spacing; class changes at x = 0.5.
  std::vector<Point3> pts;
  std::vector<ClassId> gt;
  for (int i = 0; i < 80; ++i) {
    const double x = i * 0.013 + 0.004;
    pts.emplace_back(x, 0, 0);
    gt.push_back(x < 0.5 ? 0 : 1);
  }
  const auto mask = boundary_mask(pts, gt, 0.1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool expect = std::abs(pts[i].x() - 0.5) < 0.1 - 0.013;
    const bool far = std::abs(pts[i].x() - 0.5) > 0.1 + 0.013;
    if (expect) EXPECT_TRUE(mask[i]) << i;
    if (far) EXPECT_FALSE(mask[i]) << i;
  }
  // Brute-force definition.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool b = false;
    for (std::size_t j = 0; j < pts.size(); ++j) b |= gt[j] != gt[i] && (pts[i] - pts[j]).norm() <= 0.1;
    EXPECT_EQ(static_cast<bool>(mask[i]), b) << i;
  }
}

TEST(Boundary, SplitMetricsPartitionThePoints) {
  std::vector<Point3> pts;
  std::vector<ClassId> gt, pred;
  for (int i = 0; i < 100; ++i) {
    pts.emplace_back(i * 0.01, 0, 0);
    gt.push_back(i < 50 ? 0 : 1);
    pred.push_back(i < 45 ? 0 : 1);  // errors only near the interface
  }
  const auto mask = boundary_mask(pts, gt, 0.1);
  const auto split = split_metrics(pred, gt, mask, 2);
  ASSERT_TRUE(split.boundary && split.inner);
  EXPECT_DOUBLE_EQ(*split.inner, 100.0);
  EXPECT_LT(*split.boundary, 100.0);
  const auto eval = evaluate_cloud(pts, pred, gt, 2, 0.1);
  EXPECT_EQ(eval.split.boundary, split.boundary);
  EXPECT_DOUBLE_EQ(eval.pct_labeled, 100.0);
}

TEST(Binning, EdgesAndClosedLastBin) {
  const std::vector<ClassId> gt = {1, 1, 1, 1, 0};
  const std::vector<ClassId> pred = {1, 0, 1, 1, 0};
  const std::vector<double> score = {0.0, 0.05, 0.5, 1.0, 0.95};
  const BinInput in{pred, gt, score};
  const std::vector<double> edges = {0.0, 0.1, 0.9, 1.0};
  const auto bins = binned_accuracy(std::span<const BinInput>(&in, 1), edges);
  ASSERT_EQ(bins.size(), 3u);
  EXPECT_EQ(bins[0].points, 2u);
  EXPECT_DOUBLE_EQ(*bins[0].mean_accuracy, 50.0);
  EXPECT_EQ(bins[1].points, 1u);
  EXPECT_EQ(bins[2].points, 2u);  // 0.95 and 1.0
  EXPECT_DOUBLE_EQ(*bins[2].mean_accuracy, 100.0);
  EXPECT_EQ(uniform_bin_edges(10).size(), 11u);
  EXPECT_DOUBLE_EQ(uniform_bin_edges(10)[3], 0.3);
}

TEST(Binning, PerCloudMeanAndStandardError) {
  const std::vector<ClassId> gt = {1, 1, 1, 1};
  const std::vector<ClassId> p1 = {1, 1, 1, 1};
  const std::vector<ClassId> p2 = {1, 1, 0, 0};
  const std::vector<ClassId> p3 = {0, 0, 0, 0};
  const std::vector<double> s = {0.5, 0.5, 0.5, 0.5};
  const BinInput in[] = {{p1, gt, s}, {p2, gt, s}, {p3, gt, s}};
  const std::vector<double> edges = {0.0, 1.0};
  const auto bins = binned_accuracy(in, edges);
  EXPECT_EQ(bins[0].clouds, 3u);
  EXPECT_DOUBLE_EQ(*bins[0].mean_accuracy, 50.0);
  // Sample std of {100, 50, 0} is 50; divided by sqrt(3).
  EXPECT_NEAR(*bins[0].std_error, 50.0 / std::sqrt(3.0), 1e-9);
  const std::vector<double> bad = {1.0, 0.0};
  EXPECT_THROW(binned_accuracy(in, bad), Error);
}

TEST(Aggregate, MeanOverCloudsAndSummedConfusion) {
  std::vector<Point3> pts = {Point3(0, 0, 0), Point3(1, 0, 0), Point3(2, 0, 0), Point3(3, 0, 0)};
  const std::vector<ClassId> gt = {0, 0, 1, 1};
  const std::vector<ClassId> pa = {0, 0, 1, 1};
  const std::vector<ClassId> pb = {0, 1, 1, 1};
  const std::vector<ClassId> pc = {0, kUnlabeled, 1, 1};
  const LabeledCloud clouds[] = {{pts, pa, gt, {}}, {pts, pb, gt, {}}, {pts, pc, gt, {}}};
  const auto r = evaluate_clouds(clouds, 2, 0.1);
  EXPECT_EQ(r.clouds, 3u);
  EXPECT_NEAR(r.oa, (100.0 + 75.0 + 100.0) / 3.0, 1e-9);
  EXPECT_NEAR(r.pct_labeled, (100.0 + 100.0 + 75.0) / 3.0, 1e-9);
  EXPECT_EQ(r.confusion.total(), 11u);
  EXPECT_EQ(r.confusion.at(0, 1), 1u);
  EXPECT_TRUE(r.bins.empty());
}
