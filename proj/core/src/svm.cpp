#include "autolabel/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <list>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "autolabel/error.hpp"
#include "autolabel/geom/sampling.hpp"
#include "autolabel/parallel.hpp"

namespace autolabel {

double provenance_weight(Provenance p) {
  switch (p) {
    case Provenance::kMeshSample:
      return 10.0;
    case Provenance::kClosestScan:
      return 5.0;
    case Provenance::kLowRegion:
      return 1.0;
    case Provenance::kOutsideHull:
      return 10.0;
    case Provenance::kFarthest:
      return 1.0;
  }
  return 1.0;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kMeshSample:
      return "mesh_sample";
    case Provenance::kClosestScan:
      return "closest_scan";
    case Provenance::kLowRegion:
      return "low_region";
    case Provenance::kOutsideHull:
      return "outside_hull";
    case Provenance::kFarthest:
      return "farthest";
  }
  return "?";
}

std::size_t WeightedTrainingSet::count(int label) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [&](const TrainingSample& s) { return s.label == label; }));
}

ConvexHull3 build_h_mesh(const TriangleMesh& world_mesh, double factor) {
  return scale_hull(convex_hull(world_mesh.vertices), factor);
}

namespace {

struct PointHash {
  std::size_t operator()(const Point3& p) const {
    std::size_t h = 0;
    for (int i = 0; i < 3; ++i) h = h * 1000003u ^ std::hash<double>{}(p[i]);
    return h;
  }
};

struct PointEq {
  bool operator()(const Point3& a, const Point3& b) const { return a == b; }
};

// Keeps at most `cap` entries, chosen uniformly at random, in original order.
void subsample(std::vector<TrainingSample>& items, std::size_t cap, std::uint64_t seed) {
  if (items.size() <= cap) return;
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<TrainingSample> kept;
  kept.reserve(cap);
  for (auto i : idx) kept.push_back(items[i]);
  items = std::move(kept);
}

}  // namespace

WeightedTrainingSet build_training_set(const PointCloud& section, const TriangleMesh& world_mesh,
                                       const RegionScoreField& r_scores,
                                       std::span<const std::uint32_t> p_closest,
                                       const ConvexHull3& h_mesh, std::span<const double> distances,
                                       std::uint64_t seed, const TrainingSetParams& params) {
  if (section.empty()) throw Error("training set needs a non-empty section");
  if (r_scores.size() != section.size() || distances.size() != section.size()) {
    throw Error("training inputs do not match the section size");
  }

  std::vector<TrainingSample> object;
  std::unordered_set<Point3, PointHash, PointEq> sampled;
  for (const auto& s : sample_surface(world_mesh, params.mesh_samples, seed)) {
    object.push_back({s.point, +1, provenance_weight(Provenance::kMeshSample), Provenance::kMeshSample});
    sampled.insert(s.point);
  }
  for (auto i : p_closest) {
    if (sampled.contains(section.points[i])) continue;
    object.push_back({section.points[i], +1, provenance_weight(Provenance::kClosestScan),
                      Provenance::kClosestScan});
  }

  std::vector<TrainingSample> background;
  for (std::size_t i = 0; i < section.size(); ++i) {
    const Point3& p = section.points[i];
    if (!h_mesh.contains(p)) {
      background.push_back({p, -1, provenance_weight(Provenance::kOutsideHull), Provenance::kOutsideHull});
    } else if (r_scores[i] && *r_scores[i] < params.low_region_cut) {
      background.push_back({p, -1, provenance_weight(Provenance::kLowRegion), Provenance::kLowRegion});
    }
  }

  WeightedTrainingSet ts;
  if (background.empty()) {
    std::vector<std::size_t> idx(section.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return distances[a] > distances[b]; });
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(params.fallback_fraction * static_cast<double>(section.size()))));
    idx.resize(std::min(take, idx.size()));
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) {
      background.push_back({section.points[i], -1, provenance_weight(Provenance::kFarthest), Provenance::kFarthest});
    }
    ts.background_fallback = true;
  }

  subsample(object, params.per_class_cap, seed ^ 0x9e3779b97f4a7c15ULL);
  subsample(background, params.per_class_cap, seed ^ 0xc2b2ae3d27d4eb4fULL);
  ts.samples = std::move(object);
  ts.samples.insert(ts.samples.end(), background.begin(), background.end());
  return ts;
}

FeatureScaling bounding_sphere_scaling(std::span<const Point3> points) {
  FeatureScaling s;
  if (points.empty()) return s;
  Eigen::AlignedBox3d box;
  for (const auto& p : points) box.extend(p);
  s.center = box.center();
  double r = 0.0;
  for (const auto& p : points) r = std::max(r, (p - s.center).norm());
  s.radius = r > 0.0 ? r : 1.0;
  return s;
}

namespace {

// Lazily computed kernel rows with LRU eviction once the byte budget is hit.
class KernelCache {
 public:
  KernelCache(const std::vector<Point3>& x, double gamma, double cache_mb)
      : x_(x), gamma_(gamma) {
    const double row_bytes = static_cast<double>(x.size()) * sizeof(double);
    capacity_ = std::max<std::size_t>(2, static_cast<std::size_t>(cache_mb * 1024.0 * 1024.0 / row_bytes));
    diag_.assign(x.size(), 1.0);  // exp(0)
  }

  double diag(std::size_t i) const { return diag_[i]; }

  const std::vector<double>& row(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    std::vector<double> r(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) r[j] = std::exp(-gamma_ * (x_[i] - x_[j]).squaredNorm());
    lru_.emplace_front(i, std::move(r));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const std::vector<Point3>& x_;
  double gamma_;
  std::size_t capacity_;
  std::vector<double> diag_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> index_;
};

constexpr double kTau = 1e-12;

}  // namespace

SvmModel fit_svm(const WeightedTrainingSet& ts, const SvmParams& params,
                 std::optional<FeatureScaling> scaling) {
  const std::size_t n = ts.samples.size();
  if (ts.count(+1) == 0 || ts.count(-1) == 0) throw Error("SVM training needs both classes");
  if (!(params.C > 0.0)) throw Error("SVM C must be positive");
  if (params.gamma && !(*params.gamma > 0.0)) throw Error("SVM gamma must be positive");

  SvmModel model;
  std::vector<Point3> raw;
  raw.reserve(n);
  for (const auto& s : ts.samples) raw.push_back(s.x);
  model.scaling = scaling ? *scaling : bounding_sphere_scaling(raw);
  if (!(model.scaling.radius > 0.0)) throw Error("feature scaling radius must be positive");

  std::vector<Point3> x(n);
  std::vector<double> y(n);
  std::vector<double> upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = model.scaling.apply(ts.samples[i].x);
    y[i] = ts.samples[i].label > 0 ? 1.0 : -1.0;
    upper[i] = params.C * ts.samples[i].weight;
  }

  if (params.gamma) {
    model.gamma = *params.gamma;
  } else {
    Point3 mean = Point3::Zero();
    for (const auto& p : x) mean += p;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& p : x) var += (p - mean).squaredNorm();
    var /= 3.0 * static_cast<double>(n);
    model.gamma = var > 0.0 ? 1.0 / (3.0 * var) : 1.0;
  }

  KernelCache kernel(x, model.gamma, params.cache_mb);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // Q alpha - e
  const std::size_t max_iter = params.max_iterations > 0 ? params.max_iterations
                                                         : std::max<std::size_t>(10'000'000, 100 * n);
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < upper[t]) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < upper[t]); };

  std::size_t iter = 0;
  double violation = 0.0;
  for (;; ++iter) {
    // Maximal violating pair.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    violation = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (violation <= params.tol) {
      model.converged = true;
      break;
    }
    if (iter >= max_iter) break;

    const std::vector<double>& ki = kernel.row(i);
    const std::vector<double>& kj = kernel.row(j);
    const double ci = upper[i];
    const double cj = upper[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double qij = y[i] * y[j] * ki[j];

    if (y[i] != y[j]) {
      double quad = kernel.diag(i) + kernel.diag(j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = kernel.diag(i) + kernel.diag(j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    // ki/kj may be invalidated by a later row() call; both are used here only.
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * ki[t] * dai + y[j] * kj[t] * daj);
    }
  }
  model.iterations = iter;
  model.max_violation = violation;

  // Bias: average over free vectors, else the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= upper[t]) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  model.bias = -rho;

  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] - 1.0);
  model.objective = obj / 2.0;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(ts.samples[t].x);
      model.coef.push_back(alpha[t] * y[t]);
    }
  }
  model.alpha = std::move(alpha);
  return model;
}

double SvmModel::decision(const Point3& x) const {
  const Point3 q = scaling.apply(x);
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    f += coef[i] * std::exp(-gamma * (scaling.apply(support_vectors[i]) - q).squaredNorm());
  }
  return f;
}

double sigmoid_probability(double f, double a, double b) {
  const double z = a * f + b;
  // 1 / (1 + exp(z)) without overflow.
  return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

double SvmModel::probability(const Point3& x) const { return sigmoid_probability(decision(x), platt_a, platt_b); }

PlattFit fit_sigmoid(std::span<const double> dec, std::span<const int> labels) {
  if (dec.size() != labels.size()) throw Error("decision values and labels differ in length");
  double prior1 = 0.0;
  double prior0 = 0.0;
  for (int l : labels) (l > 0 ? prior1 : prior0) += 1.0;
  PlattFit fit;
  if (prior1 == 0.0 || prior0 == 0.0) {
    fit.fallback = true;
    return fit;
  }

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const std::size_t n = dec.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int it = 0; it < kMaxIter; ++it) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = t[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  fit.a = a;
  fit.b = b;
  return fit;
}

PlattFit platt_calibrate(SvmModel& model, const WeightedTrainingSet& ts) {
  std::vector<double> dec;
  std::vector<int> labels;
  dec.reserve(ts.samples.size());
  labels.reserve(ts.samples.size());
  for (const auto& s : ts.samples) {
    dec.push_back(model.decision(s.x));
    labels.push_back(s.label);
  }
  const PlattFit fit = fit_sigmoid(dec, labels);
  model.platt_a = fit.a;
  model.platt_b = fit.b;
  model.platt_fallback = fit.fallback;
  return fit;
}

std::vector<double> svm_score(const SvmModel& model, std::span<const Point3> points, int threads) {
  std::vector<Point3> sv;
  sv.reserve(model.support_vectors.size());
  for (const auto& s : model.support_vectors) sv.push_back(model.scaling.apply(s));
  std::vector<double> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const Point3 q = model.scaling.apply(points[i]);
    double f = model.bias;
    for (std::size_t k = 0; k < sv.size(); ++k) f += model.coef[k] * std::exp(-model.gamma * (sv[k] - q).squaredNorm());
    out[i] = sigmoid_probability(f, model.platt_a, model.platt_b);
  });
  return out;
}

void write_svm_model(std::ostream& out, const SvmModel& model) {
  out << std::setprecision(17);
  out << "autolabel-svm 1\n";
  out << "gamma " << model.gamma << "\n";
  out << "bias " << model.bias << "\n";
  out << "platt " << model.platt_a << " " << model.platt_b << "\n";
  out << "center " << model.scaling.center.x() << " " << model.scaling.center.y() << " "
      << model.scaling.center.z() << "\n";
  out << "radius " << model.scaling.radius << "\n";
  out << "support_vectors " << model.support_vectors.size() << "\n";
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    const auto& p = model.support_vectors[i];
    out << model.coef[i] << " " << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
}

SvmModel read_svm_model(std::istream& in) {
  auto expect = [&](const std::string& key) {
    std::string tok;
    if (!(in >> tok) || tok != key) throw Error("svm model: expected '" + key + "', got '" + tok + "'");
  };
  SvmModel m;
  int version = 0;
  expect("autolabel-svm");
  if (!(in >> version) || version != 1) throw Error("svm model: unsupported version");
  expect("gamma");
  in >> m.gamma;
  expect("bias");
  in >> m.bias;
  expect("platt");
  in >> m.platt_a >> m.platt_b;
  expect("center");
  in >> m.scaling.center.x() >> m.scaling.center.y() >> m.scaling.center.z();
  expect("radius");
  in >> m.scaling.radius;
  expect("support_vectors");
  std::size_t count = 0;
  in >> count;
  if (!in) throw Error("svm model: malformed header");
  m.support_vectors.resize(count);
  m.coef.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& p = m.support_vectors[i];
    if (!(in >> m.coef[i] >> p.x() >> p.y() >> p.z())) {
      throw Error("svm model: truncated support vector " + std::to_string(i));
    }
  }
  m.converged = true;
  return m;
}

}  // namespace autolabel
