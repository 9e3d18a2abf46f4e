#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "autolabel/geom/convex_hull.hpp"
#include "autolabel/geom/types.hpp"
#include "autolabel/region_score.hpp"

namespace autolabel {

// ---------------------------------------------------------------------------
// Training data

/// Where a training sample came from. The weight of each source scales the
/// box constraint C for that sample.
enum class Provenance : std::uint8_t {
  kMeshSample,    // uniformly sampled from the posed mesh surface (object)
  kClosestScan,   // scan point nearest to some mesh foot point (object)
  kLowRegion,     // region score below the cut (background)
  kOutsideHull,   // outside the scaled mesh hull (background)
  kFarthest,      // fallback: largest point-to-mesh distance (background)
};

double provenance_weight(Provenance p);
const char* provenance_name(Provenance p);

struct TrainingSample {
  Point3 x;
  int label;  // +1 object, -1 background
  double weight;
  Provenance provenance;
};

struct WeightedTrainingSet {
  std::vector<TrainingSample> samples;
  /// Set when the background class had to be filled by the farthest-points
  /// fallback.
  bool background_fallback = false;

  std::size_t count(int label) const;
};

struct TrainingSetParams {
  std::size_t mesh_samples = 1000;
  std::size_t per_class_cap = 1000;
  double low_region_cut = 0.25;
  double hull_scale = 1.5;
  double fallback_fraction = 0.05;
};

/// Hull of the posed mesh vertices scaled about their centroid.
ConvexHull3 build_h_mesh(const TriangleMesh& world_mesh, double factor = 1.5);

/// Assembles the object/background sets for one section.
///  - object: mesh surface samples (w=10) and the section's closest scan
///    points (w=5); a closest point coinciding with a mesh sample is dropped.
///  - background: defined region score < low_region_cut (w=1) and points
///    outside h_mesh (w=10); a point in both keeps w=10.
/// Each class is subsampled to per_class_cap. When no background point
/// exists, the fallback_fraction of section points with the largest
/// distances becomes background (w=1) and the set is flagged.
WeightedTrainingSet build_training_set(const PointCloud& section, const TriangleMesh& world_mesh,
                                       const RegionScoreField& r_scores,
                                       std::span<const std::uint32_t> p_closest,
                                       const ConvexHull3& h_mesh, std::span<const double> distances,
                                       std::uint64_t seed, const TrainingSetParams& params = {});

// ---------------------------------------------------------------------------
// Model

/// Coordinates enter the kernel as (x - center) / radius.
struct FeatureScaling {
  Point3 center = Point3::Zero();
  double radius = 1.0;

  Point3 apply(const Point3& x) const { return (x - center) / radius; }
};

/// Center and radius of the axis-aligned bounding box's circumscribed sphere.
FeatureScaling bounding_sphere_scaling(std::span<const Point3> points);

struct SvmParams {
  double C = 1.0;
  /// RBF width; when empty, 1 / (3 * mean per-axis variance) of the scaled
  /// training coordinates.
  std::optional<double> gamma;
  /// Stop once the maximal KKT violation drops to tol.
  double tol = 1e-3;
  /// 0 selects max(1e7, 100 n).
  std::size_t max_iterations = 0;
  double cache_mb = 256.0;
};

struct SvmModel {
  std::vector<Point3> support_vectors;  // world coordinates
  std::vector<double> coef;             // alpha_i * y_i
  double bias = 0.0;
  double gamma = 1.0;
  FeatureScaling scaling;
  double platt_a = -1.0;
  double platt_b = 0.0;

  // Diagnostics from fitting.
  std::vector<double> alpha;  // one per training sample
  double objective = 0.0;     // 0.5 a'Qa - e'a at the returned iterate
  double max_violation = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool platt_fallback = false;

  double decision(const Point3& x) const;
  /// Platt probability of the object class.
  double probability(const Point3& x) const;
};

/// Weighted C-SVM (RBF) via SMO with maximal-violating-pair selection and
/// per-sample box constraints 0 <= alpha_i <= C * w_i. Throws if either class
/// is missing or C/gamma are non-positive.
SvmModel fit_svm(const WeightedTrainingSet& ts, const SvmParams& params = {},
                 std::optional<FeatureScaling> scaling = std::nullopt);

struct PlattFit {
  double a = -1.0;
  double b = 0.0;
  bool fallback = false;
};

/// Regularized maximum-likelihood sigmoid fit of P(object | f) =
/// 1 / (1 + exp(a f + b)) using Platt's smoothed targets and a damped Newton
/// iteration with backtracking.
PlattFit fit_sigmoid(std::span<const double> decision_values, std::span<const int> labels);

/// Fits (A, B) on the training decision values and stores them in `model`.
PlattFit platt_calibrate(SvmModel& model, const WeightedTrainingSet& ts);

double sigmoid_probability(double decision_value, double a, double b);

std::vector<double> svm_score(const SvmModel& model, std::span<const Point3> points, int threads = 1);

/// Plain-text model dump; see README for the layout.
void write_svm_model(std::ostream& out, const SvmModel& model);
SvmModel read_svm_model(std::istream& in);

}  // namespace autolabel
