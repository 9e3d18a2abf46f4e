#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "autolabel/error.hpp"
#include "autolabel/svm.hpp"
#include "oracles.hpp"

using namespace autolabel;

namespace {

WeightedTrainingSet two_blobs(std::size_t n, std::uint64_t seed, double overlap = 0.6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, overlap);
  std::uniform_int_distribution<int> w(1, 3);
  WeightedTrainingSet ts;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 ? 1 : -1;
    const Point3 c = label > 0 ? Point3(1, 0, 0) : Point3(-1, 0.5, 0);
    ts.samples.push_back({c + Point3(g(rng), g(rng), g(rng)), label, static_cast<double>(w(rng)),
                          label > 0 ? Provenance::kMeshSample : Provenance::kOutsideHull});
  }
  return ts;
}

Eigen::MatrixXd q_matrix(const SvmModel& m, const WeightedTrainingSet& ts) {
  const auto n = static_cast<Eigen::Index>(ts.samples.size());
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Point3 xi = m.scaling.apply(ts.samples[i].x), xj = m.scaling.apply(ts.samples[j].x);
      q(i, j) = ts.samples[i].label * ts.samples[j].label * std::exp(-m.gamma * (xi - xj).squaredNorm());
    }
  }
  return q;
}

}  // namespace

TEST(Svm, DualObjectiveMatchesReferenceQp) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto ts = two_blobs(40 + seed, seed);
    SvmParams params;
    params.C = 0.7;
    params.tol = 1e-6;
    const SvmModel m = fit_svm(ts, params);
    ASSERT_TRUE(m.converged);
    std::vector<int> y;
    std::vector<double> c;
    for (const auto& s : ts.samples) {
      y.push_back(s.label);
      c.push_back(params.C * s.weight);
    }
    const Eigen::MatrixXd q = q_matrix(m, ts);
    const double ref = oracle::solve_dual_qp(q, y, c, 20000);
    EXPECT_NEAR(m.objective, ref, 1e-4 * std::abs(ref)) << "seed " << seed;
    EXPECT_NEAR(m.objective, oracle::dual_objective(q, m.alpha), 1e-9 * std::abs(ref));
  }
}

TEST(Svm, DefaultToleranceAlsoWithinReference) {
  const auto ts = two_blobs(50, 9);
  const SvmModel m = fit_svm(ts);
  std::vector<int> y;
  std::vector<double> c;
  for (const auto& s : ts.samples) {
    y.push_back(s.label);
    c.push_back(s.weight);
  }
  const double ref = oracle::solve_dual_qp(q_matrix(m, ts), y, c, 20000);
  EXPECT_NEAR(m.objective, ref, 1e-4 * std::abs(ref));
}

TEST(Svm, FeasibilityAndBiasConstraint) {
  const auto ts = two_blobs(300, 7, 0.9);
  SvmParams params;
  params.C = 2.0;
  const SvmModel m = fit_svm(ts, params);
  double sum = 0.0;
  for (std::size_t i = 0; i < ts.samples.size(); ++i) {
    EXPECT_GE(m.alpha[i], 0.0);
    EXPECT_LE(m.alpha[i], params.C * ts.samples[i].weight + 1e-12);
    sum += m.alpha[i] * ts.samples[i].label;
  }
  EXPECT_NEAR(sum, 0.0, 1e-6);
  EXPECT_LE(m.max_violation, params.tol);
}

TEST(Svm, LabelFlipNegatesDecision) {
  const auto ts = two_blobs(80, 8);
  auto flipped = ts;
  for (auto& s : flipped.samples) s.label = -s.label;
  SvmParams params;
  params.tol = 1e-8;
  const SvmModel a = fit_svm(ts, params);
  const SvmModel b = fit_svm(flipped, params);
  for (double x = -2; x <= 2; x += 0.25) {
    const Point3 p(x, 0.1 * x, -0.2);
    EXPECT_NEAR(a.decision(p), -b.decision(p), 1e-5);
  }
}

TEST(Svm, SeparatesAndScoresProbabilities) {
  const auto ts = two_blobs(200, 10, 0.3);
  SvmModel m = fit_svm(ts);
  platt_calibrate(m, ts);
  EXPECT_LT(m.platt_a, 0.0);
  EXPECT_GT(m.probability(Point3(1, 0, 0)), 0.9);
  EXPECT_LT(m.probability(Point3(-1, 0.5, 0)), 0.1);
  const std::vector<Point3> pts = {Point3(1, 0, 0), Point3(0, 0, 0), Point3(-1, 0.5, 0)};
  const auto s1 = svm_score(m, pts, 1);
  const auto s3 = svm_score(m, pts, 3);
  EXPECT_EQ(s1, s3);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(s1[i], m.probability(pts[i]), 1e-12);
}

TEST(Svm, KernelCacheSizeDoesNotChangeResult) {
  const auto ts = two_blobs(400, 12, 0.8);
  SvmParams small;
  small.cache_mb = 0.01;
  const SvmModel a = fit_svm(ts);
  const SvmModel b = fit_svm(ts, small);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Svm, InvalidInputsThrow) {
  auto ts = two_blobs(20, 13);
  SvmParams bad;
  bad.C = 0.0;
  EXPECT_THROW(fit_svm(ts, bad), Error);
  bad.C = 1.0;
  bad.gamma = -1.0;
  EXPECT_THROW(fit_svm(ts, bad), Error);
  WeightedTrainingSet one;
  one.samples.push_back(ts.samples[1]);
  EXPECT_THROW(fit_svm(one), Error);
}

TEST(Platt, MatchesGridSearchMinimum) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> f;
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    const int label = i % 3 ? 1 : -1;
    f.push_back(label * 1.2 + g(rng));
    y.push_back(label);
  }
  const PlattFit fit = fit_sigmoid(f, y);
  const auto [ga, gb] = oracle::platt_grid(f, y);
  EXPECT_FALSE(fit.fallback);
  EXPECT_NEAR(fit.a, ga, 1e-3);
  EXPECT_NEAR(fit.b, gb, 1e-3);
  EXPECT_LE(oracle::platt_nll(f, y, fit.a, fit.b), oracle::platt_nll(f, y, ga, gb) + 1e-6);
}

TEST(Platt, SingleClassFallsBack) {
  const std::vector<double> f = {0.1, 0.5, 2.0};
  const std::vector<int> y = {1, 1, 1};
  const PlattFit fit = fit_sigmoid(f, y);
  EXPECT_TRUE(fit.fallback);
  EXPECT_EQ(fit.a, -1.0);
  EXPECT_EQ(fit.b, 0.0);
}

TEST(Platt, StrictlyMonotoneForNegativeA) {
  double prev = -1.0;
  for (double f = -5; f <= 5; f += 0.1) {
    const double p = sigmoid_probability(f, -1.7, 0.3);
    EXPECT_GT(p, prev);
    prev = p;
  }
  EXPECT_GT(sigmoid_probability(1000, -1, 0), 0.99);
  EXPECT_LT(sigmoid_probability(-1000, -1, 0), 0.01);
}

TEST(Svm, ModelDumpRoundTrip) {
  const auto ts = two_blobs(60, 15);
  SvmModel m = fit_svm(ts);
  platt_calibrate(m, ts);
  std::stringstream ss;
  write_svm_model(ss, m);
  const SvmModel r = read_svm_model(ss);
  EXPECT_EQ(r.support_vectors, m.support_vectors);
  EXPECT_EQ(r.coef, m.coef);
  EXPECT_EQ(r.bias, m.bias);
  EXPECT_EQ(r.gamma, m.gamma);
  EXPECT_EQ(r.platt_a, m.platt_a);
  EXPECT_EQ(r.platt_b, m.platt_b);
  EXPECT_EQ(r.decision(Point3(0.3, 0.2, 0.1)), m.decision(Point3(0.3, 0.2, 0.1)));
  std::stringstream bad("autolabel-svm 2\n");
  EXPECT_THROW(read_svm_model(bad), Error);
}

// ---------------------------------------------------------------------------
// Training-set construction

namespace {

struct TrainingFixture {
  PointCloud section;
  TriangleMesh world;
  RegionScoreField r;
  std::vector<std::uint32_t> closest;
  std::vector<double> distances;
};

TrainingFixture training_fixture(std::size_t far_points) {
  TrainingFixture f;
  f.world = oracle::unit_box();
  // Points on the box top, a few low-region floor points inside H_mesh, and
  // far points outside it.
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) f.section.points.emplace_back(-0.45 + 0.1 * i, -0.45 + 0.1 * j, 1.0);
  for (int i = 0; i < 20; ++i) f.section.points.emplace_back(-0.7 + 0.01 * i, 0.0, 0.0);
  for (std::size_t i = 0; i < far_points; ++i) f.section.points.emplace_back(3.0 + 0.001 * i, 0.0, 0.0);
  const std::size_t n = f.section.size();
  f.r.assign(n, std::nullopt);
  for (std::size_t i = 0; i < 100; ++i) f.r[i] = 0.9;
  for (std::size_t i = 100; i < 120; ++i) f.r[i] = 0.1;
  for (std::size_t i = 120; i < n; ++i) f.r[i] = 0.1;
  for (std::uint32_t i = 0; i < 100; ++i) f.closest.push_back(i);
  for (const auto& p : f.section.points) f.distances.push_back(oracle::mesh_distance(f.world, p));
  return f;
}

}  // namespace

TEST(TrainingSet, WeightsFollowProvenance) {
  const auto f = training_fixture(50);
  const auto h_mesh = build_h_mesh(f.world, 1.5);
  TrainingSetParams params;
  params.mesh_samples = 200;  // keeps the object class under the cap
  const auto ts = build_training_set(f.section, f.world, f.r, f.closest, h_mesh, f.distances, 1, params);
  std::map<Provenance, std::size_t> count;
  for (const auto& s : ts.samples) {
    ++count[s.provenance];
    switch (s.provenance) {
      case Provenance::kMeshSample: EXPECT_EQ(s.weight, 10.0); EXPECT_EQ(s.label, 1); break;
      case Provenance::kClosestScan: EXPECT_EQ(s.weight, 5.0); EXPECT_EQ(s.label, 1); break;
      case Provenance::kLowRegion: EXPECT_EQ(s.weight, 1.0); EXPECT_EQ(s.label, -1); break;
      case Provenance::kOutsideHull: EXPECT_EQ(s.weight, 10.0); EXPECT_EQ(s.label, -1); break;
      case Provenance::kFarthest: ADD_FAILURE() << "unexpected fallback"; break;
    }
  }
  EXPECT_EQ(count[Provenance::kMeshSample], 200u);
  EXPECT_EQ(count[Provenance::kClosestScan], 100u);
  EXPECT_EQ(count[Provenance::kLowRegion], 20u);  // inside the 1.5x hull
  EXPECT_EQ(count[Provenance::kOutsideHull], 50u);
  EXPECT_FALSE(ts.background_fallback);
}

TEST(TrainingSet, PerClassCapIsOneThousand) {
  const auto f = training_fixture(3000);
  const auto h_mesh = build_h_mesh(f.world, 1.5);
  const auto ts = build_training_set(f.section, f.world, f.r, f.closest, h_mesh, f.distances, 2);
  EXPECT_EQ(TrainingSetParams{}.per_class_cap, 1000u);
  EXPECT_EQ(TrainingSetParams{}.mesh_samples, 1000u);
  EXPECT_EQ(ts.count(+1), 1000u);
  EXPECT_EQ(ts.count(-1), 1000u);
  const auto again = build_training_set(f.section, f.world, f.r, f.closest, h_mesh, f.distances, 2);
  for (std::size_t i = 0; i < ts.samples.size(); ++i) EXPECT_EQ(ts.samples[i].x, again.samples[i].x);
}

TEST(TrainingSet, MeshHullScaledByOneAndAHalf) {
  EXPECT_EQ(TrainingSetParams{}.hull_scale, 1.5);
  const auto world = oracle::unit_box(2, 2, 2);
  const auto h = build_h_mesh(world);
  EXPECT_NEAR(h.volume(), 8.0 * 1.5 * 1.5 * 1.5, 1e-9);
  EXPECT_TRUE(h.contains(Point3(1.49, 0, 1)));
  EXPECT_FALSE(h.contains(Point3(1.51, 0, 1)));
}

TEST(TrainingSet, FallbackUsesFarthestPoints) {
  auto f = training_fixture(0);
  // Remove the low-region points so nothing qualifies as background.
  for (std::size_t i = 100; i < f.section.size(); ++i) f.r[i] = 0.9;
  const auto h_mesh = build_h_mesh(f.world, 1.5);
  const auto ts = build_training_set(f.section, f.world, f.r, f.closest, h_mesh, f.distances, 3);
  EXPECT_TRUE(ts.background_fallback);
  const auto expected = static_cast<std::size_t>(std::ceil(0.05 * f.section.size()));
  EXPECT_EQ(ts.count(-1), expected);
  for (const auto& s : ts.samples) {
    if (s.label < 0) {
      EXPECT_EQ(s.provenance, Provenance::kFarthest);
      EXPECT_GE(oracle::mesh_distance(f.world, s.x), 0.145);
    }
  }
}
