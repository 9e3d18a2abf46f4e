#include <random>

#include <benchmark/benchmark.h>

#include "autolabel/geom/bvh.hpp"
#include "autolabel/geom/convex_hull.hpp"
#include "autolabel/geom/kdtree.hpp"
#include "autolabel/pipeline.hpp"
#include "autolabel/svm.hpp"
#include "autolabel/synth.hpp"

using namespace autolabel;

namespace {

std::vector<Point3> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = Point3(u(rng), u(rng), u(rng));
  return pts;
}

TriangleMesh sphere_mesh(int rings, int segments) {
  TriangleMesh m;
  for (int i = 0; i <= rings; ++i) {
    const double theta = M_PI * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double phi = 2 * M_PI * j / segments;
      m.vertices.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    }
  }
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      const auto a = static_cast<std::uint32_t>(i * segments + j);
      const auto b = static_cast<std::uint32_t>(i * segments + (j + 1) % segments);
      const auto c = static_cast<std::uint32_t>((i + 1) * segments + j);
      const auto d = static_cast<std::uint32_t>((i + 1) * segments + (j + 1) % segments);
      m.triangles.push_back({a, c, b});
      m.triangles.push_back({b, c, d});
    }
  }
  return m;
}

Scene bench_scene() {
  SceneSpec spec = random_scene_spec(7);
  SyntheticScene s = generate_scene(spec);
  return {std::move(s.cloud), std::move(s.models), std::move(s.registry)};
}

}  // namespace

static void BM_KdTreeBuild(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(100000);

static void BM_KdTreeKnn16(benchmark::State& state) {
  const auto pts = random_points(100000, 2);
  const KdTree tree(pts);
  const auto queries = random_points(1000, 3);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(tree.knn(q, 16));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(BM_KdTreeKnn16);

static void BM_BvhClosest(benchmark::State& state) {
  const TriangleBvh bvh(sphere_mesh(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0))));
  const auto queries = random_points(1000, 4);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(bvh.closest(q));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(BM_BvhClosest)->Arg(16)->Arg(64);

static void BM_ConvexHull(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(convex_hull(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConvexHull)->Arg(1000)->Arg(20000);

static void BM_SvmFit(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 0.6);
  WeightedTrainingSet ts;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const int label = i % 2 ? 1 : -1;
    ts.samples.push_back({Point3(label * 0.5 + g(rng), g(rng), g(rng)), label, 1.0 + static_cast<double>(i % 3),
                          Provenance::kMeshSample});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_svm(ts));
}
BENCHMARK(BM_SvmFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_PipelineScene(benchmark::State& state) {
  const Scene scene = bench_scene();
  PipelineConfig config;
  config.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(scene, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.cloud.size()));
}
BENCHMARK(BM_PipelineScene)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_MAIN();
