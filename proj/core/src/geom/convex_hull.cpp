#include "autolabel/geom/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "autolabel/error.hpp"

namespace autolabel {

namespace {

struct Face {
  std::array<std::uint32_t, 3> v;
  Vector3 normal;
  double offset;
  bool alive = true;
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

Face make_face(const std::vector<Point3>& pts, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  Face f;
  f.v = {a, b, c};
  Vector3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double len = n.norm();
  f.normal = len > 0.0 ? Vector3(n / len) : Vector3::Zero();
  f.offset = f.normal.dot(pts[a]);
  return f;
}

double extent_of(std::span<const Point3> points) {
  Eigen::AlignedBox3d box;
  for (const auto& p : points) box.extend(p);
  return box.diagonal().norm();
}

struct RankProbe {
  int rank = 0;
  std::array<std::size_t, 4> picks{};
};

// Greedy rank detection: farthest point, farthest from the line, farthest
// from the plane.
RankProbe probe_rank(std::span<const Point3> pts, double tol) {
  RankProbe r;
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[i0];
    if (p.x() < q.x() || (p.x() == q.x() && (p.y() < q.y() || (p.y() == q.y() && p.z() < q.z())))) i0 = i;
  }
  r.picks[0] = i0;

  auto argmax = [&](auto&& dist) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = dist(pts[i]);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return std::pair{best, best_d};
  };

  const Point3 a = pts[i0];
  auto [i1, d1] = argmax([&](const Point3& p) { return (p - a).norm(); });
  if (d1 <= tol) return r;
  r.rank = 1;
  r.picks[1] = i1;

  const Vector3 dir = (pts[i1] - a).normalized();
  auto [i2, d2] = argmax([&](const Point3& p) {
    const Vector3 w = p - a;
    return (w - w.dot(dir) * dir).norm();
  });
  if (d2 <= tol) return r;
  r.rank = 2;
  r.picks[2] = i2;

  const Vector3 n = dir.cross(pts[i2] - a).normalized();
  auto [i3, d3] = argmax([&](const Point3& p) { return std::abs(n.dot(p - a)); });
  if (d3 <= tol) return r;
  r.rank = 3;
  r.picks[3] = i3;
  return r;
}

// Inflated stand-ins for rank-deficient input: the returned set spans a
// full-dimensional polytope whose bounding planes are those of the
// lower-dimensional hull pushed outward by `delta`.
std::vector<Point3> inflate_degenerate(std::span<const Point3> pts, const RankProbe& probe,
                                       double delta) {
  std::vector<Point3> out;
  const Point3 a = pts[probe.picks[0]];
  if (probe.rank == 0) {
    for (int i = 0; i < 8; ++i) {
      out.push_back(a + delta * Vector3((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1));
    }
    return out;
  }

  const Vector3 dir = (pts[probe.picks[1]] - a).normalized();
  if (probe.rank == 1) {
    Vector3 u = dir.unitOrthogonal();
    Vector3 w = dir.cross(u);
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& p : pts) {
      const double t = dir.dot(p - a);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    for (double t : {lo - delta, hi + delta}) {
      for (int s = 0; s < 4; ++s) {
        out.push_back(a + t * dir + delta * ((s & 1) ? 1.0 : -1.0) * u +
                      delta * ((s & 2) ? 1.0 : -1.0) * w);
      }
    }
    return out;
  }

  // Planar: 2D monotone-chain hull in the (dir, side) basis.
  const Vector3 normal = dir.cross(pts[probe.picks[2]] - a).normalized();
  const Vector3 side = normal.cross(dir);
  std::vector<Eigen::Vector2d> flat;
  flat.reserve(pts.size());
  for (const auto& p : pts) flat.emplace_back(dir.dot(p - a), side.dot(p - a));
  std::sort(flat.begin(), flat.end(), [](const Eigen::Vector2d& l, const Eigen::Vector2d& r) {
    return l.x() < r.x() || (l.x() == r.x() && l.y() < r.y());
  });
  auto cross2 = [](const Eigen::Vector2d& o, const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    return (p.x() - o.x()) * (q.y() - o.y()) - (p.y() - o.y()) * (q.x() - o.x());
  };
  std::vector<Eigen::Vector2d> ring(2 * flat.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    while (k >= 2 && cross2(ring[k - 2], ring[k - 1], flat[i]) <= 0.0) --k;
    ring[k++] = flat[i];
  }
  for (std::size_t i = flat.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(ring[k - 2], ring[k - 1], flat[i]) <= 0.0) --k;
    ring[k++] = flat[i];
  }
  ring.resize(k - 1);  // counter-clockwise, last point repeats the first

  const std::size_t m = ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d prev = ring[(i + m - 1) % m];
    const Eigen::Vector2d cur = ring[i];
    const Eigen::Vector2d next = ring[(i + 1) % m];
    auto outward = [](const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
      const Eigen::Vector2d d = (to - from).normalized();
      return Eigen::Vector2d(d.y(), -d.x());
    };
    const Eigen::Vector2d n0 = outward(prev, cur);
    const Eigen::Vector2d n1 = outward(cur, next);
    const Eigen::Vector2d shifted = cur + delta * (n0 + n1) / (1.0 + n0.dot(n1));
    const Point3 base = a + shifted.x() * dir + shifted.y() * side;
    out.push_back(base + delta * normal);
    out.push_back(base - delta * normal);
  }
  return out;
}

}  // namespace

bool ConvexHull3::contains(const Point3& p, double tolerance) const {
  if (half_spaces_.empty()) return false;
  for (const auto& h : half_spaces_) {
    if (h.signed_distance(p) > tolerance) return false;
  }
  return true;
}

Point3 ConvexHull3::vertex_centroid() const {
  Point3 c = Point3::Zero();
  for (const auto& v : vertices_) c += v;
  return vertices_.empty() ? c : Point3(c / static_cast<double>(vertices_.size()));
}

double ConvexHull3::volume() const {
  const Point3 c = vertex_centroid();
  double vol = 0.0;
  for (const auto& f : facets_) {
    vol += (vertices_[f[0]] - c).dot((vertices_[f[1]] - c).cross(vertices_[f[2]] - c));
  }
  return vol / 6.0;
}

ConvexHull3 ConvexHull3::scaled(double factor) const {
  ConvexHull3 out = *this;
  const Point3 c = vertex_centroid();
  for (auto& v : out.vertices_) v = c + factor * (v - c);
  for (auto& h : out.half_spaces_) {
    const double at_center = h.normal.dot(c);
    h.offset = at_center + factor * (h.offset - at_center);
  }
  return out;
}

ConvexHull3 scale_hull(const ConvexHull3& hull, double factor) {
  if (!(factor > 0.0)) throw Error("hull scale factor must be positive");
  return hull.scaled(factor);
}

ConvexHull3 convex_hull(std::span<const Point3> input) {
  if (input.empty()) throw Error("cannot build the convex hull of an empty point set");
  const double scale = std::max(1.0, extent_of(input));
  const RankProbe probe = probe_rank(input, 1e-9 * scale);

  std::vector<Point3> inflated;
  std::span<const Point3> pts = input;
  RankProbe full = probe;
  if (probe.rank < 3) {
    inflated = inflate_degenerate(input, probe, ConvexHull3::kDegenerateInflation);
    pts = inflated;
    full = probe_rank(pts, 0.0);
  }
  const double eps = 1e-11 * scale;

  // Seed tetrahedron, oriented so every face points away from its centroid.
  std::vector<Point3> P(pts.begin(), pts.end());
  const Point3 inner = (P[full.picks[0]] + P[full.picks[1]] + P[full.picks[2]] + P[full.picks[3]]) / 4.0;
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_owner;
  auto add_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    Face f = make_face(P, a, b, c);
    if (f.normal.dot(inner) > f.offset) {
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    const auto id = static_cast<std::uint32_t>(faces.size());
    for (int e = 0; e < 3; ++e) edge_owner[edge_key(f.v[e], f.v[(e + 1) % 3])] = id;
    faces.push_back(f);
  };
  const auto t0 = static_cast<std::uint32_t>(full.picks[0]);
  const auto t1 = static_cast<std::uint32_t>(full.picks[1]);
  const auto t2 = static_cast<std::uint32_t>(full.picks[2]);
  const auto t3 = static_cast<std::uint32_t>(full.picks[3]);
  add_face(t0, t1, t2);
  add_face(t0, t1, t3);
  add_face(t0, t2, t3);
  add_face(t1, t2, t3);

  // Far points first: most later points then fall inside early.
  std::vector<std::uint32_t> order(P.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> dist(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) dist[i] = (P[i] - inner).squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t l, std::uint32_t r) { return dist[l] > dist[r]; });

  std::vector<std::uint32_t> alive_ids{0, 1, 2, 3};
  std::vector<char> visible;
  std::vector<std::uint32_t> visited;
  std::vector<std::uint32_t> frontier;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;

  for (std::uint32_t pi : order) {
    if (pi == t0 || pi == t1 || pi == t2 || pi == t3) continue;
    const Point3& p = P[pi];
    std::int64_t start = -1;
    for (auto id : alive_ids) {
      if (faces[id].alive && faces[id].normal.dot(p) - faces[id].offset > eps) {
        start = id;
        break;
      }
    }
    if (start < 0) continue;

    visible.assign(faces.size(), 0);
    visited.clear();
    horizon.clear();
    frontier.assign(1, static_cast<std::uint32_t>(start));
    visible[start] = 1;
    while (!frontier.empty()) {
      const auto fid = frontier.back();
      frontier.pop_back();
      visited.push_back(fid);
      const Face& f = faces[fid];
      for (int e = 0; e < 3; ++e) {
        const auto a = f.v[e];
        const auto b = f.v[(e + 1) % 3];
        const auto nb = edge_owner.at(edge_key(b, a));
        if (visible[nb]) continue;
        const Face& g = faces[nb];
        if (g.normal.dot(p) - g.offset > eps) {
          visible[nb] = 1;
          frontier.push_back(nb);
        } else {
          horizon.emplace_back(a, b);
        }
      }
    }
    for (auto fid : visited) {
      faces[fid].alive = false;
      for (int e = 0; e < 3; ++e) edge_owner.erase(edge_key(faces[fid].v[e], faces[fid].v[(e + 1) % 3]));
    }
    for (const auto& [a, b] : horizon) {
      Face f = make_face(P, a, b, pi);
      const auto id = static_cast<std::uint32_t>(faces.size());
      for (int e = 0; e < 3; ++e) edge_owner[edge_key(f.v[e], f.v[(e + 1) % 3])] = id;
      faces.push_back(f);
      alive_ids.push_back(id);
    }
    if (alive_ids.size() > 4 * edge_owner.size() / 3 + 64) {
      std::erase_if(alive_ids, [&](std::uint32_t id) { return !faces[id].alive; });
    }
  }

  ConvexHull3 hull;
  hull.degenerate_ = probe.rank < 3;
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  std::vector<std::uint32_t> used;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    for (auto v : f.v) {
      if (remap.emplace(v, 0).second) used.push_back(v);
    }
  }
  std::sort(used.begin(), used.end());
  for (std::size_t i = 0; i < used.size(); ++i) {
    remap[used[i]] = static_cast<std::uint32_t>(i);
    hull.vertices_.push_back(P[used[i]]);
  }
  for (const auto& f : faces) {
    if (!f.alive) continue;
    hull.facets_.push_back({remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]});
    if (f.normal.squaredNorm() == 0.0) continue;
    const bool merged = std::any_of(hull.half_spaces_.begin(), hull.half_spaces_.end(),
                                    [&](const HalfSpace& h) { return h.normal.dot(f.normal) > 1.0 - 1e-10; });
    if (!merged) hull.half_spaces_.push_back({f.normal, f.offset});
  }
  // Tighten each plane to its supporting offset so every hull vertex (and
  // hence every generating point) satisfies it.
  for (auto& h : hull.half_spaces_) {
    double support = -std::numeric_limits<double>::infinity();
    for (const auto& v : hull.vertices_) support = std::max(support, h.normal.dot(v));
    h.offset = support;
  }
  return hull;
}

}  // namespace autolabel
