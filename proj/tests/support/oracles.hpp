#pragma once

// Brute-force reference implementations used only by tests. Each one takes a
// different route from the library code it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "autolabel/geom/types.hpp"

namespace oracle {

using autolabel::ClassId;
using autolabel::Point3;
using autolabel::TriangleMesh;

// ---------------------------------------------------------------------------
// Nearest neighbors

inline std::vector<std::pair<double, std::uint32_t>> knn(const std::vector<Point3>& pts, const Point3& q,
                                                         std::size_t k) {
  std::vector<std::pair<double, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < pts.size(); ++i) all.emplace_back((pts[i] - q).squaredNorm(), i);
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  return all;
}

inline std::vector<std::uint32_t> radius(const std::vector<Point3>& pts, const Point3& q, double r) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    if ((pts[i] - q).squaredNorm() <= r * r) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Point-triangle distance: plane projection when it lands inside, otherwise
// the nearest of the three edge segments.

inline Point3 closest_on_segment(const Point3& p, const Point3& a, const Point3& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

inline double triangle_distance(const Point3& p, const Point3& a, const Point3& b, const Point3& c) {
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  if (n2 > 0.0) {
    const Point3 proj = p - n * (n.dot(p - a) / n2);
    // Barycentric coordinates from signed sub-areas.
    const double u = n.dot((c - b).cross(proj - b)) / n2;
    const double v = n.dot((a - c).cross(proj - c)) / n2;
    const double w = 1.0 - u - v;
    if (u >= 0 && v >= 0 && w >= 0) return (p - proj).norm();
  }
  double best = (p - closest_on_segment(p, a, b)).norm();
  best = std::min(best, (p - closest_on_segment(p, b, c)).norm());
  best = std::min(best, (p - closest_on_segment(p, c, a)).norm());
  return best;
}

inline double mesh_distance(const TriangleMesh& m, const Point3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : m.triangles) {
    best = std::min(best, triangle_distance(p, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Convex hull containment by enumerating every supporting plane through three
// input points (O(n^4); keep n small).

struct Plane {
  Eigen::Vector3d n;
  double d;
};

inline std::vector<Plane> supporting_planes(const std::vector<Point3>& pts, double eps = 1e-12) {
  std::vector<Plane> planes;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Eigen::Vector3d nrm = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (nrm.norm() < 1e-12) continue;
        nrm.normalize();
        const double d = nrm.dot(pts[i]);
        bool pos = false, neg = false;
        for (const auto& q : pts) {
          const double s = nrm.dot(q) - d;
          pos = pos || s > eps;
          neg = neg || s < -eps;
        }
        if (pos && neg) continue;
        if (pos) planes.push_back({-nrm, -d});
        else planes.push_back({nrm, d});
      }
    }
  }
  return planes;
}

inline bool inside_planes(const std::vector<Plane>& planes, const Point3& p, double tol) {
  for (const auto& pl : planes) {
    if (pl.n.dot(p) - pl.d > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Weighted SVM dual: min 0.5 a'Qa - e'a, y'a = 0, 0 <= a_i <= c_i, solved by
// FISTA with an exact projection onto the feasible set (bisection on the
// equality multiplier).

inline std::vector<double> project_box_hyperplane(const std::vector<double>& v, const std::vector<int>& y,
                                                  const std::vector<double>& c) {
  const std::size_t n = v.size();
  auto at = [&](double mu) {
    std::vector<double> a(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::clamp(v[i] - mu * y[i], 0.0, c[i]);
      s += y[i] * a[i];
    }
    return std::make_pair(a, s);
  };
  double lo = -1.0, hi = 1.0;
  while (at(lo).second < 0) lo *= 2;
  while (at(hi).second > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid).second > 0) lo = mid;
    else hi = mid;
  }
  return at(0.5 * (lo + hi)).first;
}

inline double dual_objective(const Eigen::MatrixXd& Q, const std::vector<double>& a) {
  const Eigen::Map<const Eigen::VectorXd> va(a.data(), static_cast<Eigen::Index>(a.size()));
  return 0.5 * va.dot(Q * va) - va.sum();
}

inline double solve_dual_qp(const Eigen::MatrixXd& Q, const std::vector<int>& y, const std::vector<double>& c,
                            int iterations = 200000) {
  const std::size_t n = y.size();
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(L, 1e-12);
  std::vector<double> x(n, 0.0), z = x, prev = x;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::Map<const Eigen::VectorXd> vz(z.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd g = Q * vz - Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - step * g[static_cast<Eigen::Index>(i)];
    prev = x;
    x = project_box_hyperplane(v, y, c);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + ((t - 1.0) / tn) * (x[i] - prev[i]);
    t = tn;
  }
  return dual_objective(Q, x);
}

// ---------------------------------------------------------------------------
// Segmentation metrics by explicit per-class counting.

struct ClassCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

struct NaiveMetrics {
  double oa = 0, macc = 0, mf1 = 0, miou = 0;
  std::vector<std::vector<std::uint64_t>> confusion;
};

inline NaiveMetrics naive_metrics(const std::vector<ClassId>& pred, const std::vector<ClassId>& gt, std::size_t k) {
  NaiveMetrics m;
  m.confusion.assign(k, std::vector<std::uint64_t>(k, 0));
  std::uint64_t total = 0, correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == autolabel::kUnlabeled || gt[i] == autolabel::kUnlabeled) continue;
    ++m.confusion[gt[i]][pred[i]];
    ++total;
    correct += pred[i] == gt[i];
  }
  m.oa = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  std::size_t used = 0;
  for (std::size_t c = 0; c < k; ++c) {
    ClassCounts cc;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == autolabel::kUnlabeled || gt[i] == autolabel::kUnlabeled) continue;
      if (pred[i] == c && gt[i] == c) ++cc.tp;
      else if (pred[i] == c) ++cc.fp;
      else if (gt[i] == c) ++cc.fn;
    }
    if (cc.tp + cc.fp + cc.fn == 0) continue;
    ++used;
    const double tp = static_cast<double>(cc.tp), fp = static_cast<double>(cc.fp), fn = static_cast<double>(cc.fn);
    m.macc += cc.tp + cc.fn ? tp / (tp + fn) : 0.0;
    m.mf1 += 2 * tp / (2 * tp + fp + fn);
    m.miou += tp / (tp + fp + fn);
  }
  m.macc *= 100.0 / static_cast<double>(used);
  m.mf1 *= 100.0 / static_cast<double>(used);
  m.miou *= 100.0 / static_cast<double>(used);
  return m;
}

// ---------------------------------------------------------------------------
// Platt objective with smoothed targets, minimized by nested grid refinement.

inline double platt_nll(const std::vector<double>& f, const std::vector<int>& y, double a, double b) {
  double np = 0, nn = 0;
  for (int v : y) (v > 0 ? np : nn) += 1;
  const double hi = (np + 1) / (np + 2), lo = 1 / (nn + 2);
  double nll = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = y[i] > 0 ? hi : lo;
    const double z = a * f[i] + b;
    // -[t log p + (1-t) log(1-p)] with p = 1/(1+exp(z)).
    const double log1pexp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    nll += t * log1pexp + (1 - t) * (log1pexp - z);
  }
  return nll;
}

inline std::pair<double, double> platt_grid(const std::vector<double>& f, const std::vector<int>& y) {
  double ca = 0, cb = 0, span = 64;
  for (int level = 0; level < 40; ++level) {
    double best = std::numeric_limits<double>::infinity(), ba = ca, bb = cb;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double a = ca + span * i / 10.0, b = cb + span * j / 10.0;
        const double v = platt_nll(f, y, a, b);
        if (v < best) {
          best = v;
          ba = a;
          bb = b;
        }
      }
    }
    ca = ba;
    cb = bb;
    span *= 0.5;
  }
  return {ca, cb};
}

// ---------------------------------------------------------------------------
// Symmetric 3x3 eigenvalues by cyclic Jacobi rotations, ascending, with the
// eigenvector of the smallest eigenvalue.

inline std::pair<std::array<double, 3>, Eigen::Vector3d> jacobi3(Eigen::Matrix3d a) {
  Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        a = r.transpose() * a * r;
        v = v * r;
      }
    }
  }
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  return {{a(idx[0], idx[0]), a(idx[1], idx[1]), a(idx[2], idx[2])}, v.col(idx[0])};
}

// ---------------------------------------------------------------------------
// Random helpers.

inline TriangleMesh random_mesh(std::mt19937_64& rng, int triangles, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  TriangleMesh m;
  for (int t = 0; t < triangles; ++t) {
    const auto base = static_cast<std::uint32_t>(m.vertices.size());
    const Point3 c(u(rng), u(rng), u(rng));
    for (int k = 0; k < 3; ++k) m.vertices.push_back(c + 0.3 * Point3(u(rng), u(rng), u(rng)));
    m.triangles.push_back({base, base + 1, base + 2});
  }
  return m;
}

inline TriangleMesh unit_box(double sx = 1, double sy = 1, double sz = 1) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? sx / 2 : -sx / 2, (i & 2) ? sy / 2 : -sy / 2, (i & 4) ? sz : 0.0);
  }
  const std::uint32_t q[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& f : q) {
    m.triangles.push_back({f[0], f[1], f[2]});
    m.triangles.push_back({f[0], f[2], f[3]});
  }
  return m;
}

}  // namespace oracle
