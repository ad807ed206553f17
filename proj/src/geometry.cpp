// Copyright 2026 The Retrench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "retrench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "retrench/error.hpp"

namespace retrench {

// ---------------------------------------------------------------- BVH

void Bvh::build(const std::vector<Vec3>& verts, const std::vector<Triangle>& tris, std::vector<int32_t> subset) {
  nodes_.clear();
  order_ = std::move(subset);
  if (order_.empty()) return;
  std::vector<Vec3> centroid(tris.size());
  for (int32_t t : order_) {
    const auto& v = tris[t].v;
    centroid[t] = (verts[v[0]] + verts[v[1]] + verts[v[2]]) / 3.0;
  }
  std::function<int32_t(int32_t, int32_t)> rec = [&](int32_t first, int32_t count) {
    int32_t idx = static_cast<int32_t>(nodes_.size());
    nodes_.emplace_back();
    Box3 box, cbox;
    for (int32_t i = first; i < first + count; ++i) {
      for (int32_t v : tris[order_[i]].v) box.expand(verts[v]);
      cbox.expand(centroid[order_[i]]);
    }
    nodes_[idx].box = box;
    if (count <= 4) {
      nodes_[idx].first = first;
      nodes_[idx].count = count;
      return idx;
    }
    Vec3 ext = cbox.extent();
    int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    int32_t mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                     [&](int32_t a, int32_t b) {
                       if (centroid[a][axis] != centroid[b][axis]) return centroid[a][axis] < centroid[b][axis];
                       return a < b;
                     });
    int32_t l = rec(first, mid - first);
    int32_t r = rec(mid, first + count - mid);
    nodes_[idx].left = l;
    nodes_[idx].right = r;
    return idx;
  };
  rec(0, static_cast<int32_t>(order_.size()));
}

// ---------------------------------------------------------------- model

Box3 GeometryModel::bounds() const {
  if (!bvh_.empty()) return bvh_.nodes()[0].box;
  Box3 b;
  for (const Vec3& v : vertices) b.expand(v);
  return b;
}

const SurfaceInfo* GeometryModel::surface(int id) const {
  for (const auto& s : surfaces)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<int> GeometryModel::surface_ids() const {
  std::set<int> ids;
  for (const auto& t : triangles) ids.insert(t.surface);
  return {ids.begin(), ids.end()};
}

void GeometryModel::build() {
  std::vector<int32_t> all(triangles.size());
  std::iota(all.begin(), all.end(), 0);
  bvh_.build(vertices, triangles, all);
  std::map<int, std::vector<int32_t>> per;
  for (size_t i = 0; i < triangles.size(); ++i) per[triangles[i].surface].push_back(static_cast<int32_t>(i));
  surface_bvh_.clear();
  for (auto& [id, list] : per) surface_bvh_[id].build(vertices, triangles, std::move(list));
}

const Bvh& GeometryModel::surface_bvh(int id) const {
  static const Bvh empty;
  auto it = surface_bvh_.find(id);
  return it == surface_bvh_.end() ? empty : it->second;
}

// ---------------------------------------------------------------- rays

namespace {

struct LineHit {
  RayHit hit;
  bool ambiguous = false;
};

std::optional<LineHit> line_triangle(const GeometryModel& m, int32_t tri, const Vec3& o, const Vec3& d) {
  const auto& v = m.triangles[tri].v;
  const Vec3 &a = m.vertices[v[0]], &b = m.vertices[v[1]], &c = m.vertices[v[2]];
  Vec3 e1 = b - a, e2 = c - a;
  Vec3 p = cross(d, e2);
  double det = dot(e1, p);
  double scale = norm(e1) * norm(e2) * norm(d);
  if (std::fabs(det) <= 1e-14 * scale) return std::nullopt;
  double inv = 1.0 / det;
  Vec3 s = o - a;
  double u = dot(s, p) * inv;
  constexpr double kTol = 1e-12;
  if (u < -kTol || u > 1 + kTol) return std::nullopt;
  Vec3 q = cross(s, e1);
  double w = dot(d, q) * inv;
  if (w < -kTol || u + w > 1 + kTol) return std::nullopt;
  LineHit out;
  out.hit.triangle = tri;
  out.hit.surface = m.triangles[tri].surface;
  out.hit.t = dot(e2, q) * inv;
  out.hit.point = o + d * out.hit.t;
  constexpr double kEdge = 1e-9;
  out.ambiguous = u < kEdge || w < kEdge || u + w > 1 - kEdge || std::fabs(det) <= 1e-9 * scale;
  return out;
}

// Parameter interval of the line inside a box, or false.
bool line_box(const Box3& box, const Vec3& o, const Vec3& d, double pad, double& t0, double& t1) {
  t0 = -INFINITY;
  t1 = INFINITY;
  for (int a = 0; a < 3; ++a) {
    double lo = box.lo[a] - pad, hi = box.hi[a] + pad;
    if (std::fabs(d[a]) < 1e-300) {
      if (o[a] < lo || o[a] > hi) return false;
      continue;
    }
    double ta = (lo - o[a]) / d[a], tb = (hi - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

template <class F>
void for_each_line_candidate(const GeometryModel& m, const Bvh& bvh, const Vec3& o, const Vec3& d,
                             const std::function<double()>& bound, F&& visit) {
  if (bvh.empty()) return;
  double pad = 1e-9 * (1 + m.bounds().diagonal());
  std::vector<int32_t> stack{0};
  while (!stack.empty()) {
    const Bvh::Node& n = bvh.nodes()[stack.back()];
    stack.pop_back();
    double t0, t1;
    if (!line_box(n.box, o, d, pad, t0, t1)) continue;
    double tmin = (t0 <= 0 && t1 >= 0) ? 0 : std::min(std::fabs(t0), std::fabs(t1));
    if (tmin > bound()) continue;
    if (n.left < 0) {
      for (int32_t i = n.first; i < n.first + n.count; ++i) visit(bvh.order()[i]);
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
}

}  // namespace

std::optional<RayHit> intersect_triangle(const GeometryModel& m, int32_t tri, const Vec3& origin, const Vec3& dir) {
  auto h = line_triangle(m, tri, origin, dir);
  if (!h) return std::nullopt;
  return h->hit;
}

bool better_hit(const RayHit& a, const RayHit& b) {
  double fa = std::fabs(a.t), fb = std::fabs(b.t);
  if (fa != fb) return fa < fb;
  if ((a.t >= 0) != (b.t >= 0)) return a.t >= 0;
  return a.triangle < b.triangle;
}

std::optional<RayHit> raycast_first(const GeometryModel& m, const Vec3& origin, const Vec3& dir) {
  std::optional<RayHit> best;
  double slack = 1e-9 * (1 + m.bounds().diagonal()) / std::max(norm(dir), 1e-300);
  for_each_line_candidate(
      m, m.bvh(), origin, dir, [&] { return best ? std::fabs(best->t) + slack : INFINITY; },
      [&](int32_t tri) {
        auto h = intersect_triangle(m, tri, origin, dir);
        if (h && (!best || better_hit(*h, *best))) best = h;
      });
  return best;
}

std::optional<RayHit> raycast_first_brute(const GeometryModel& m, const Vec3& origin, const Vec3& dir) {
  std::optional<RayHit> best;
  for (size_t i = 0; i < m.triangles.size(); ++i) {
    auto h = intersect_triangle(m, static_cast<int32_t>(i), origin, dir);
    if (h && (!best || better_hit(*h, *best))) best = h;
  }
  return best;
}

// ---------------------------------------------------------------- closest point

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

ClosestPoint closest_point(const GeometryModel& m, const Vec3& p, int surface) {
  const Bvh& bvh = surface < 0 ? m.bvh() : m.surface_bvh(surface);
  ClosestPoint best;
  if (bvh.empty()) return best;
  auto box_dist = [&](const Box3& b) {
    Vec3 q = max(b.lo, min(p, b.hi));
    return distance(p, q);
  };
  std::vector<int32_t> stack{0};
  while (!stack.empty()) {
    const Bvh::Node& n = bvh.nodes()[stack.back()];
    stack.pop_back();
    if (box_dist(n.box) > best.distance) continue;
    if (n.left < 0) {
      for (int32_t i = n.first; i < n.first + n.count; ++i) {
        int32_t t = bvh.order()[i];
        const auto& v = m.triangles[t].v;
        Vec3 q = closest_point_on_triangle(p, m.vertices[v[0]], m.vertices[v[1]], m.vertices[v[2]]);
        double d = distance(p, q);
        if (d < best.distance || (d == best.distance && t < best.triangle)) best = {q, d, t};
      }
    } else {
      const Bvh::Node& l = bvh.nodes()[n.left];
      const Bvh::Node& r = bvh.nodes()[n.right];
      // Visit the nearer child first.
      if (box_dist(l.box) < box_dist(r.box)) {
        stack.push_back(n.right);
        stack.push_back(n.left);
      } else {
        stack.push_back(n.left);
        stack.push_back(n.right);
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- inside test

bool point_inside(const GeometryModel& m, const Vec3& p, double eps) {
  if (m.triangles.empty()) return false;
  if (eps < 0) eps = m.eps_geom();
  if (closest_point(m, p).distance <= eps) return true;
  std::mt19937_64 rng(m.seed);
  std::normal_distribution<double> gauss;
  int parities[3];
  int valid = 0;
  for (int attempt = 0; attempt < 64 && valid < 3; ++attempt) {
    Vec3 d = normalized(Vec3{gauss(rng), gauss(rng), gauss(rng)});
    int crossings = 0;
    bool ambiguous = false;
    for_each_line_candidate(
        m, m.bvh(), p, d, [] { return INFINITY; },
        [&](int32_t tri) {
          if (ambiguous) return;
          auto h = line_triangle(m, tri, p, d);
          if (!h) return;
          if (h->ambiguous || std::fabs(h->hit.t) <= eps) {
            ambiguous = true;
            return;
          }
          crossings += h->hit.t > 0;
        });
    if (!ambiguous) parities[valid++] = crossings & 1;
  }
  if (valid < 3) throw Error(ErrorCode::kNonWatertight, "no unambiguous ray direction for the inside test");
  if (parities[0] != parities[1] || parities[1] != parities[2])
    throw Error(ErrorCode::kNonWatertight, "ray parity differs between directions");
  return parities[0] == 1;
}

// ---------------------------------------------------------------- topology

bool watertight(const GeometryModel& m) {
  std::map<std::pair<int32_t, int32_t>, int> directed;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) ++directed[{t.v[k], t.v[(k + 1) % 3]}];
  for (const auto& [e, n] : directed) {
    if (n != 1) return false;
    auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return !m.triangles.empty();
}

int euler_characteristic(const GeometryModel& m) {
  std::set<std::pair<int32_t, int32_t>> edges;
  std::set<int32_t> verts;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int32_t a = t.v[k], b = t.v[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
      verts.insert(a);
    }
  return static_cast<int>(verts.size()) - static_cast<int>(edges.size()) + static_cast<int>(m.triangles.size());
}

// ---------------------------------------------------------------- generators

namespace {

class Builder {
 public:
  explicit Builder(double quantum) : q_(quantum) {}

  int32_t vertex(const Vec3& p) {
    Key k{std::llround(p.x / q_), std::llround(p.y / q_), std::llround(p.z / q_)};
    auto [it, fresh] = index_.emplace(k, static_cast<int32_t>(model.vertices.size()));
    if (fresh) model.vertices.push_back(p);
    return it->second;
  }

  // Adds a quad a-b-c-d split along a-c, oriented so the normal follows `out`.
  void quad(int32_t a, int32_t b, int32_t c, int32_t d, int surface, const std::function<Vec3(const Vec3&)>& out) {
    tri(a, b, c, surface, out);
    tri(a, c, d, surface, out);
  }

  void tri(int32_t a, int32_t b, int32_t c, int surface, const std::function<Vec3(const Vec3&)>& out) {
    if (a == b || b == c || a == c) return;
    const Vec3 &pa = model.vertices[a], &pb = model.vertices[b], &pc = model.vertices[c];
    Vec3 n = cross(pb - pa, pc - pa);
    if (dot(n, out((pa + pb + pc) / 3.0)) < 0) std::swap(b, c);
    model.triangles.push_back({{a, b, c}, surface});
  }

  GeometryModel model;

 private:
  struct Key {
    long long x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const noexcept {
      return std::hash<long long>()(k.x) * 31 * 31 + std::hash<long long>()(k.y) * 31 + std::hash<long long>()(k.z);
    }
  };
  double q_;
  std::unordered_map<Key, int32_t, KeyHash> index_;
};

// Regular grid on an axis-aligned rectangle of a box face.
void planar_grid(Builder& B, int axis, double level, const Vec3& lo, const Vec3& hi, int nu, int nv, int surface,
                 const Vec3& normal) {
  int ua = (axis + 1) % 3, va = (axis + 2) % 3;
  std::vector<int32_t> ids((nu + 1) * (nv + 1));
  for (int j = 0; j <= nv; ++j)
    for (int i = 0; i <= nu; ++i) {
      Vec3 p;
      p[axis] = level;
      p[ua] = lo[ua] + (hi[ua] - lo[ua]) * i / nu;
      p[va] = lo[va] + (hi[va] - lo[va]) * j / nv;
      if (i == nu) p[ua] = hi[ua];
      if (j == nv) p[va] = hi[va];
      ids[i + (nu + 1) * j] = B.vertex(p);
    }
  auto out = [&](const Vec3&) { return normal; };
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i)
      B.quad(ids[i + (nu + 1) * j], ids[i + 1 + (nu + 1) * j], ids[i + 1 + (nu + 1) * (j + 1)],
             ids[i + (nu + 1) * (j + 1)], surface, out);
}

// Polyline of all vertices on the segment a-b, ordered from a.
std::vector<int32_t> vertices_on_segment(const GeometryModel& m, const Vec3& a, const Vec3& b, double tol) {
  std::vector<std::pair<double, int32_t>> on;
  Vec3 d = b - a;
  double len = norm(d);
  for (size_t i = 0; i < m.vertices.size(); ++i) {
    Vec3 r = m.vertices[i] - a;
    double t = dot(r, d) / (len * len);
    if (t < -tol || t > 1 + tol) continue;
    if (norm(r - d * t) <= tol * len) on.emplace_back(t, static_cast<int32_t>(i));
  }
  std::sort(on.begin(), on.end());
  std::vector<int32_t> out;
  for (auto& [t, i] : on) out.push_back(i);
  return out;
}

void add_box_entities(GeometryModel& m, const Vec3& lo, const Vec3& hi) {
  // Surfaces 1..6: axis a at lo -> 2a+1, at hi -> 2a+2.
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) {
      SurfaceInfo info;
      info.id = 2 * a + 1 + s;
      info.shape = SurfaceShape::kPlane;
      info.point = s ? hi : lo;
      info.direction = Vec3{};
      info.direction[a] = s ? 1 : -1;
      m.surfaces.push_back(info);
    }
  int cid = 1;
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    for (int sb = 0; sb < 2; ++sb)
      for (int sc = 0; sc < 2; ++sc) {
        Vec3 p0, p1;
        p0[a] = lo[a];
        p1[a] = hi[a];
        p0[b] = p1[b] = sb ? hi[b] : lo[b];
        p0[c] = p1[c] = sc ? hi[c] : lo[c];
        Curve cv;
        cv.id = cid++;
        cv.surfaces = {std::min(2 * b + 1 + sb, 2 * c + 1 + sc), std::max(2 * b + 1 + sb, 2 * c + 1 + sc)};
        cv.points = vertices_on_segment(m, p0, p1, 1e-9);
        m.curves.push_back(cv);
      }
  }
  for (int k = 0; k < 8; ++k) {
    Corner c;
    c.id = k + 1;
    for (int a = 0; a < 3; ++a) {
      int s = (k >> a) & 1;
      c.point[a] = s ? hi[a] : lo[a];
      c.surfaces.push_back(2 * a + 1 + s);
    }
    m.corners.push_back(c);
  }
}

}  // namespace

GeometryModel make_box(const Vec3& lo, const Vec3& hi, double tessellation) {
  Vec3 ext = hi - lo;
  if (!(ext.x > 0 && ext.y > 0 && ext.z > 0)) throw Error(ErrorCode::kInvalidDims, "box must have positive size");
  if (!(tessellation > 0)) throw Error(ErrorCode::kInvalidDims, "tessellation length must be positive");
  Builder B(1e-9 * norm(ext));
  int n[3];
  for (int a = 0; a < 3; ++a) n[a] = std::max(1, static_cast<int>(std::ceil(ext[a] / tessellation - 1e-9)));
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) {
      Vec3 nrm;
      nrm[a] = s ? 1 : -1;
      planar_grid(B, a, s ? hi[a] : lo[a], lo, hi, n[(a + 1) % 3], n[(a + 2) % 3], 2 * a + 1 + s, nrm);
    }
  GeometryModel m = std::move(B.model);
  m.tessellation = tessellation;
  add_box_entities(m, lo, hi);
  m.build();
  return m;
}

GeometryModel make_box_minus_cylinder(const BoxMinusCylinder& spec) {
  const int ax = spec.axis;
  if (ax < 0 || ax > 2) throw Error(ErrorCode::kInvalidDims, "hole axis must be 0, 1 or 2");
  if (!(spec.size.x > 0 && spec.size.y > 0 && spec.size.z > 0)) throw Error(ErrorCode::kInvalidDims, "box must have positive size");
  if (!(spec.tessellation > 0)) throw Error(ErrorCode::kInvalidDims, "tessellation length must be positive");
  const int ua = (ax + 1) % 3, va = (ax + 2) % 3;
  const double A = spec.size[ua], Bsz = spec.size[va], C = spec.size[ax];
  const double r = spec.radius;
  if (!(r > 0) || !(r < 0.5 * std::min(A, Bsz))) throw Error(ErrorCode::kInvalidDims, "radius must be positive and below half the lateral size");
  const double t = spec.tessellation;
  // Local frame (u, v, w) with w along the hole; embed puts it back.
  auto embed = [&](double u, double v, double w) {
    Vec3 p;
    p[ua] = u;
    p[va] = v;
    p[ax] = w;
    return p;
  };
  const double cu = A / 2, cv = Bsz / 2;
  int mu = std::max(1, static_cast<int>(std::ceil(A / t - 1e-9)));
  int mv = std::max(1, static_cast<int>(std::ceil(Bsz / t - 1e-9)));
  while (2 * M_PI * r / (2 * (mu + mv)) > t) {
    mu *= 2;
    mv *= 2;
  }
  const int N = 2 * (mu + mv);
  // Boundary of the lateral rectangle, counterclockwise from (0, 0).
  std::vector<std::pair<double, double>> rim(N);
  for (int j = 0; j < N; ++j) {
    int k = j;
    if (k < mu) rim[j] = {A * k / mu, 0};
    else if ((k -= mu) < mv) rim[j] = {A, Bsz * k / mv};
    else if ((k -= mv) < mu) rim[j] = {A - A * k / mu, Bsz};
    else rim[j] = {0, Bsz - Bsz * (k - mu) / mv};
  }
  std::vector<std::pair<double, double>> circ(N);
  double far = 0;
  for (int j = 0; j < N; ++j) {
    double du = rim[j].first - cu, dv = rim[j].second - cv, len = std::hypot(du, dv);
    circ[j] = {cu + r * du / len, cv + r * dv / len};
    far = std::max(far, len - r);
  }
  const int rings = std::max(1, static_cast<int>(std::ceil(far / t - 1e-9)));
  const int layers = std::max(1, static_cast<int>(std::ceil(C / t - 1e-9)));

  Builder Bd(1e-9 * norm(spec.size));
  const int s_u0 = 2 * ua + 1, s_u1 = 2 * ua + 2, s_v0 = 2 * va + 1, s_v1 = 2 * va + 2;
  const int s_w0 = 2 * ax + 1, s_w1 = 2 * ax + 2, s_cyl = 7;
  auto ring_point = [&](int k, int j) -> std::pair<double, double> {
    if (k == rings) return rim[j];
    if (k == 0) return circ[j];
    double f = double(k) / rings;
    return {circ[j].first + (rim[j].first - circ[j].first) * f, circ[j].second + (rim[j].second - circ[j].second) * f};
  };
  // End caps.
  for (int cap = 0; cap < 2; ++cap) {
    double w = cap ? C : 0;
    Vec3 nrm;
    nrm[ax] = cap ? 1 : -1;
    auto out = [&](const Vec3&) { return nrm; };
    std::vector<int32_t> ids((rings + 1) * N);
    for (int k = 0; k <= rings; ++k)
      for (int j = 0; j < N; ++j) {
        auto [u, v] = ring_point(k, j);
        ids[k * N + j] = Bd.vertex(embed(u, v, w));
      }
    for (int k = 0; k < rings; ++k)
      for (int j = 0; j < N; ++j)
        Bd.quad(ids[k * N + j], ids[(k + 1) * N + j], ids[(k + 1) * N + (j + 1) % N], ids[k * N + (j + 1) % N],
                cap ? s_w1 : s_w0, out);
  }
  // Cylinder wall; outward from the solid means toward the axis.
  {
    std::vector<int32_t> ids((layers + 1) * N);
    for (int l = 0; l <= layers; ++l)
      for (int j = 0; j < N; ++j)
        ids[l * N + j] = Bd.vertex(embed(circ[j].first, circ[j].second, l == layers ? C : C * l / layers));
    auto out = [&](const Vec3& p) {
      Vec3 q = embed(cu, cv, p[ax]);
      return q - p;
    };
    for (int l = 0; l < layers; ++l)
      for (int j = 0; j < N; ++j)
        Bd.quad(ids[l * N + j], ids[l * N + (j + 1) % N], ids[(l + 1) * N + (j + 1) % N], ids[(l + 1) * N + j],
                s_cyl, out);
  }
  // Four side walls.
  Vec3 lo{0, 0, 0}, hi = spec.size;
  for (int s = 0; s < 2; ++s) {
    Vec3 nu, nv;
    nu[ua] = s ? 1 : -1;
    nv[va] = s ? 1 : -1;
    // Grids along (va, ax) on u = const, and (ax, ua) on v = const.
    if ((ua + 1) % 3 == va)
      planar_grid(Bd, ua, s ? A : 0, lo, hi, mv, layers, s ? s_u1 : s_u0, nu);
    else
      planar_grid(Bd, ua, s ? A : 0, lo, hi, layers, mv, s ? s_u1 : s_u0, nu);
    if ((va + 1) % 3 == ua)
      planar_grid(Bd, va, s ? Bsz : 0, lo, hi, mu, layers, s ? s_v1 : s_v0, nv);
    else
      planar_grid(Bd, va, s ? Bsz : 0, lo, hi, layers, mu, s ? s_v1 : s_v0, nv);
  }
  GeometryModel m = std::move(Bd.model);
  m.tessellation = t;
  add_box_entities(m, lo, hi);
  SurfaceInfo cyl;
  cyl.id = s_cyl;
  cyl.shape = SurfaceShape::kCylinder;
  cyl.point = embed(cu, cv, 0);
  cyl.direction = embed(0, 0, 1);
  cyl.radius = r;
  m.surfaces.push_back(cyl);
  // The two hole rims.
  for (int cap = 0; cap < 2; ++cap) {
    Curve c;
    c.id = 13 + cap;
    c.surfaces = {std::min(cap ? s_w1 : s_w0, s_cyl), std::max(cap ? s_w1 : s_w0, s_cyl)};
    c.closed = true;
    c.shape = CurveShape::kCircle;
    c.center = embed(cu, cv, cap ? C : 0);
    c.axis = embed(0, 0, 1);
    c.radius = r;
    for (int j = 0; j < N; ++j) c.points.push_back(Bd.vertex(embed(circ[j].first, circ[j].second, cap ? C : 0)));
    m.curves.push_back(c);
  }
  m.build();
  return m;
}

// ---------------------------------------------------------------- file IO

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string vec_str(const Vec3& v) { return g17(v.x) + " " + g17(v.y) + " " + g17(v.z); }

// Vertex order of first appearance in the triangle list.
std::vector<int32_t> appearance_order(const GeometryModel& m) {
  std::vector<int32_t> remap(m.vertices.size(), -1);
  int32_t next = 0;
  for (const auto& t : m.triangles)
    for (int32_t v : t.v)
      if (remap[v] < 0) remap[v] = next++;
  return remap;
}

}  // namespace

void write_tagged_stl(std::ostream& os, const GeometryModel& m) {
  os << "solid retrench\n";
  for (const auto& t : m.triangles) {
    const Vec3 &a = m.vertices[t.v[0]], &b = m.vertices[t.v[1]], &c = m.vertices[t.v[2]];
    os << "facet normal " << vec_str(normalized(cross(b - a, c - a))) << "\n";
    os << "  surface " << t.surface << "\n  outer loop\n";
    for (int32_t v : t.v) os << "    vertex " << vec_str(m.vertices[v]) << "\n";
    os << "  endloop\nendfacet\n";
  }
  os << "endsolid retrench\n";
}

void write_entities(std::ostream& os, const GeometryModel& m) {
  auto remap = appearance_order(m);
  os << "retrench-entities 1\n";
  os << "tessellation " << g17(m.tessellation) << "\n";
  for (const auto& s : m.surfaces) {
    os << "surface " << s.id;
    if (s.shape == SurfaceShape::kPlane) os << " plane " << vec_str(s.point) << " " << vec_str(s.direction);
    else if (s.shape == SurfaceShape::kCylinder)
      os << " cylinder " << vec_str(s.point) << " " << vec_str(s.direction) << " " << g17(s.radius);
    else os << " generic";
    os << "\n";
  }
  for (const auto& c : m.curves) {
    os << "curve " << c.id << " surfaces " << c.surfaces[0] << " " << c.surfaces[1] << " closed " << (c.closed ? 1 : 0);
    if (c.shape == CurveShape::kCircle)
      os << " circle " << vec_str(c.center) << " " << vec_str(c.axis) << " " << g17(c.radius);
    else os << " polyline";
    os << " points " << c.points.size();
    for (int32_t p : c.points) os << " " << remap.at(p);
    os << "\n";
  }
  for (const auto& c : m.corners) {
    os << "corner " << c.id << " " << vec_str(c.point) << " surfaces " << c.surfaces.size();
    for (int s : c.surfaces) os << " " << s;
    os << "\n";
  }
}

GeometryModel read_geometry(std::istream& stl, std::istream* entities) {
  GeometryModel m;
  std::map<std::tuple<double, double, double>, int32_t> index;
  std::string line, word;
  int lineno = 0, surface = 0;
  std::vector<int32_t> loop;
  bool in_solid = false;
  auto bad = [&](const std::string& what) {
    return Error(ErrorCode::kParseError, "geometry line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(stl, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (!(ls >> word)) continue;
    if (word == "solid") in_solid = true;
    else if (word == "facet") {
      surface = 0;
      loop.clear();
    } else if (word == "surface") {
      if (!(ls >> surface)) throw bad("expected surface id");
    } else if (word == "vertex") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw bad("expected three coordinates");
      auto [it, fresh] = index.emplace(std::make_tuple(p.x, p.y, p.z), static_cast<int32_t>(m.vertices.size()));
      if (fresh) m.vertices.push_back(p);
      loop.push_back(it->second);
    } else if (word == "endfacet") {
      if (loop.size() != 3) throw bad("facet must have three vertices");
      m.triangles.push_back({{loop[0], loop[1], loop[2]}, surface});
    } else if (word == "outer" || word == "endloop" || word == "endsolid") {
    } else {
      throw bad("unexpected '" + word + "'");
    }
  }
  if (!in_solid) throw Error(ErrorCode::kParseError, "geometry file has no solid");
  if (entities) {
    lineno = 0;
    if (!std::getline(*entities, line) || line != "retrench-entities 1")
      throw Error(ErrorCode::kParseError, "entity file has an unknown header");
    ++lineno;
    while (std::getline(*entities, line)) {
      ++lineno;
      std::istringstream ls(line);
      if (!(ls >> word)) continue;
      auto vec = [&]() {
        Vec3 v;
        if (!(ls >> v.x >> v.y >> v.z)) throw bad("expected a vector");
        return v;
      };
      if (word == "tessellation") {
        if (!(ls >> m.tessellation)) throw bad("expected tessellation length");
      } else if (word == "surface") {
        SurfaceInfo s;
        std::string shape;
        if (!(ls >> s.id >> shape)) throw bad("expected surface id and shape");
        if (shape == "plane") {
          s.shape = SurfaceShape::kPlane;
          s.point = vec();
          s.direction = vec();
        } else if (shape == "cylinder") {
          s.shape = SurfaceShape::kCylinder;
          s.point = vec();
          s.direction = vec();
          if (!(ls >> s.radius)) throw bad("expected radius");
        } else if (shape != "generic") {
          throw bad("unknown surface shape");
        }
        m.surfaces.push_back(s);
      } else if (word == "curve") {
        Curve c;
        std::string k1, k2, shape, k3;
        int closed;
        size_t n;
        if (!(ls >> c.id >> k1 >> c.surfaces[0] >> c.surfaces[1] >> k2 >> closed >> shape) || k1 != "surfaces" ||
            k2 != "closed")
          throw bad("malformed curve");
        c.closed = closed != 0;
        if (shape == "circle") {
          c.shape = CurveShape::kCircle;
          c.center = vec();
          c.axis = vec();
          if (!(ls >> c.radius)) throw bad("expected radius");
        } else if (shape != "polyline") {
          throw bad("unknown curve shape");
        }
        if (!(ls >> k3 >> n) || k3 != "points") throw bad("expected point list");
        c.points.resize(n);
        for (auto& p : c.points)
          if (!(ls >> p) || p < 0 || static_cast<size_t>(p) >= m.vertices.size()) throw bad("bad curve point index");
        m.curves.push_back(c);
      } else if (word == "corner") {
        Corner c;
        std::string k;
        size_t n;
        if (!(ls >> c.id)) throw bad("expected corner id");
        c.point = vec();
        if (!(ls >> k >> n) || k != "surfaces") throw bad("expected corner surfaces");
        c.surfaces.resize(n);
        for (int& s : c.surfaces)
          if (!(ls >> s)) throw bad("bad corner surface");
        m.corners.push_back(c);
      } else {
        throw bad("unexpected '" + word + "'");
      }
    }
  }
  m.build();
  return m;
}

GeometryModel read_geometry_files(const std::string& stl_path, const std::string& entities_path) {
  std::ifstream stl(stl_path);
  if (!stl) throw Error(ErrorCode::kIoError, "cannot read " + stl_path);
  if (entities_path.empty()) return read_geometry(stl, nullptr);
  std::ifstream ent(entities_path);
  if (!ent) throw Error(ErrorCode::kIoError, "cannot read " + entities_path);
  return read_geometry(stl, &ent);
}

void write_geometry_files(const GeometryModel& m, const std::string& stl_path, const std::string& entities_path) {
  std::ofstream stl(stl_path);
  if (!stl) throw Error(ErrorCode::kIoError, "cannot write " + stl_path);
  write_tagged_stl(stl, m);
  std::ofstream ent(entities_path);
  if (!ent) throw Error(ErrorCode::kIoError, "cannot write " + entities_path);
  write_entities(ent, m);
}

}  // namespace retrench
