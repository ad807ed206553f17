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

#include "retrench/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "retrench/error.hpp"

namespace retrench {

std::string_view entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::kInterior: return "interior";
    case EntityKind::kSurface: return "surface";
    case EntityKind::kCurve: return "curve";
    case EntityKind::kCorner: return "corner";
  }
  return "?";
}

// ---------------------------------------------------------------- coloring

FaceColoring color_faces(const Mesh& mesh, const GeometryModel& model) {
  FaceColoring out;
  out.table = build_face_table(mesh);
  for (size_t f = 0; f < out.table.faces.size(); ++f) {
    const FaceRecord& rec = out.table.faces[f];
    if (!rec.boundary()) continue;
    std::vector<Vec3> pts;
    Vec3 c{};
    for (int32_t n : rec.nodes) {
      pts.push_back(mesh.nodes[n]);
      c = c + mesh.nodes[n];
    }
    c = c / static_cast<double>(pts.size());
    Vec3 nrm = polygon_normal(pts);
    double size = 0;
    for (size_t k = 0; k < pts.size(); ++k) size = std::max(size, distance(pts[k], pts[(k + 1) % pts.size()]));
    int color = 0;
    std::optional<RayHit> hit;
    if (!model.triangles.empty() && norm(nrm) > 0) hit = raycast_first(model, c, normalized(nrm));
    if (hit && std::fabs(hit->t) > 2 * size) {
      ++out.far_hits;
      hit.reset();
    } else if (!hit) {
      ++out.unmapped;
    }
    if (hit) {
      color = hit->surface;
    } else {
      ClosestPoint cp = closest_point(model, c);
      if (cp.triangle >= 0) color = model.triangles[cp.triangle].surface;
    }
    out.faces.push_back(static_cast<int32_t>(f));
    out.color.push_back(color);
  }
  return out;
}

// ---------------------------------------------------------------- entities

namespace {

const Curve* find_curve(const GeometryModel& m, int id) {
  for (const auto& c : m.curves)
    if (c.id == id) return &c;
  return nullptr;
}

const Corner* find_corner(const GeometryModel& m, int id) {
  for (const auto& c : m.corners)
    if (c.id == id) return &c;
  return nullptr;
}

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 d = b - a;
  double len2 = dot(d, d);
  if (len2 == 0) return a;
  double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return a + d * t;
}

Vec3 closest_on_curve(const GeometryModel& m, const Curve& c, const Vec3& p) {
  if (c.shape == CurveShape::kCircle) {
    Vec3 a = normalized(c.axis);
    Vec3 v = p - c.center;
    v = v - a * dot(a, v);
    if (norm(v) < 1e-300) {
      Vec3 any = std::fabs(a.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      v = cross(a, any);
    }
    return c.center + normalized(v) * c.radius;
  }
  Vec3 best = p;
  double bd = INFINITY;
  size_t n = c.points.size();
  if (n == 1) return m.vertices[c.points[0]];
  size_t segs = c.closed ? n : n - 1;
  for (size_t i = 0; i < segs; ++i) {
    Vec3 q = closest_on_segment(p, m.vertices[c.points[i]], m.vertices[c.points[(i + 1) % n]]);
    double d = distance(p, q);
    if (d < bd) {
      bd = d;
      best = q;
    }
  }
  return best;
}

double curve_distance(const GeometryModel& m, const Curve& c, const Vec3& p) {
  return c.points.empty() && c.shape != CurveShape::kCircle ? INFINITY : distance(p, closest_on_curve(m, c, p));
}

}  // namespace

Vec3 project_point(const GeometryModel& model, const Binding& b, const Vec3& p) {
  switch (b.kind) {
    case EntityKind::kInterior: return p;
    case EntityKind::kCorner: {
      const Corner* c = find_corner(model, b.id);
      return c ? c->point : p;
    }
    case EntityKind::kCurve: {
      const Curve* c = find_curve(model, b.id);
      return c ? closest_on_curve(model, *c, p) : p;
    }
    case EntityKind::kSurface: {
      const SurfaceInfo* s = model.surface(b.id);
      const Bvh& bvh = model.surface_bvh(b.id);
      if (s && s->shape == SurfaceShape::kCylinder && !bvh.empty()) {
        Vec3 a = normalized(s->direction);
        // Axial extent of the tagged triangles.
        const Box3& box = bvh.nodes()[0].box;
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 0; k < 8; ++k) {
          Vec3 corner{(k & 1) ? box.hi.x : box.lo.x, (k & 2) ? box.hi.y : box.lo.y, (k & 4) ? box.hi.z : box.lo.z};
          double w = dot(corner - s->point, a);
          lo = std::min(lo, w);
          hi = std::max(hi, w);
        }
        Vec3 v = p - s->point;
        double w = dot(v, a);
        Vec3 radial = v - a * w;
        if (norm(radial) < 1e-300) radial = cross(a, std::fabs(a.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0});
        return s->point + a * std::clamp(w, lo, hi) + normalized(radial) * s->radius;
      }
      ClosestPoint cp = closest_point(model, p, b.id);
      return cp.triangle >= 0 ? cp.point : p;
    }
  }
  return p;
}

EntityBinding bind_nodes(const Mesh& mesh, const FaceColoring& colors, const GeometryModel& model,
                         BindingReport* report) {
  BindingReport rep;
  std::vector<std::set<int>> node_colors(mesh.nodes.size());
  for (size_t i = 0; i < colors.faces.size(); ++i)
    for (int32_t n : colors.table.faces[colors.faces[i]].nodes) node_colors[n].insert(colors.color[i]);
  EntityBinding out(mesh.nodes.size());

  auto nearest_curve = [&](const Vec3& p, auto&& accept) -> const Curve* {
    const Curve* best = nullptr;
    double bd = INFINITY;
    for (const auto& c : model.curves) {
      if (!accept(c)) continue;
      double d = curve_distance(model, c, p);
      if (d < bd) {
        bd = d;
        best = &c;
      }
    }
    return best;
  };
  auto nearest_corner = [&](const Vec3& p, auto&& accept) -> const Corner* {
    const Corner* best = nullptr;
    double bd = INFINITY;
    for (const auto& c : model.corners) {
      if (!accept(c)) continue;
      double d = distance(p, c.point);
      if (d < bd) {
        bd = d;
        best = &c;
      }
    }
    return best;
  };
  auto has = [](const std::set<int>& s, int v) { return s.count(v) > 0; };

  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    const auto& cs = node_colors[n];
    const Vec3& p = mesh.nodes[n];
    if (cs.empty()) continue;
    if (cs.size() == 1) {
      out[n] = {EntityKind::kSurface, *cs.begin()};
      continue;
    }
    if (cs.size() == 2) {
      const Curve* c = nearest_curve(p, [&](const Curve& c) { return has(cs, c.surfaces[0]) && has(cs, c.surfaces[1]); });
      if (!c) {
        ++rep.missing_curves;
        c = nearest_curve(p, [&](const Curve& c) { return has(cs, c.surfaces[0]) || has(cs, c.surfaces[1]); });
        if (!c) c = nearest_curve(p, [](const Curve&) { return true; });
      }
      if (c) out[n] = {EntityKind::kCurve, c->id};
      else out[n] = {EntityKind::kSurface, *cs.begin()};
      continue;
    }
    auto overlap = [&](const Corner& c) {
      int k = 0;
      for (int s : c.surfaces) k += has(cs, s);
      return k;
    };
    const Corner* c = nearest_corner(p, [&](const Corner& c) { return overlap(c) == static_cast<int>(cs.size()); });
    if (!c) {
      ++rep.missing_corners;
      int best = 0;
      for (const auto& k : model.corners) best = std::max(best, overlap(k));
      c = nearest_corner(p, [&](const Corner& k) { return overlap(k) == best; });
    }
    if (c) out[n] = {EntityKind::kCorner, c->id};
    else out[n] = {EntityKind::kSurface, *cs.begin()};
  }

  // Nodes already on a lower-dimensional entity of their surface take it.
  const double eps = 1e-9 * std::max(1.0, model.bounds().diagonal());
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    const Vec3& p = mesh.nodes[n];
    if (out[n].kind == EntityKind::kSurface) {
      int s = out[n].id;
      const Curve* c = nearest_curve(p, [&](const Curve& c) { return c.surfaces[0] == s || c.surfaces[1] == s; });
      if (c && curve_distance(model, *c, p) <= eps) out[n] = {EntityKind::kCurve, c->id};
    }
    if (out[n].kind == EntityKind::kCurve) {
      const Curve* c = find_curve(model, out[n].id);
      const Corner* k = nearest_corner(p, [&](const Corner& k) {
        return std::count(k.surfaces.begin(), k.surfaces.end(), c->surfaces[0]) &&
               std::count(k.surfaces.begin(), k.surfaces.end(), c->surfaces[1]);
      });
      if (k && distance(p, k->point) <= eps) out[n] = {EntityKind::kCorner, k->id};
    }
  }

  // A face whose nodes all lie on one curve (corners aside) would flatten
  // onto it. Free the curve node least attached to the face's color.
  std::vector<std::map<int, int>> color_count(mesh.nodes.size());
  for (size_t i = 0; i < colors.faces.size(); ++i)
    for (int32_t n : colors.table.faces[colors.faces[i]].nodes) ++color_count[n][colors.color[i]];
  const auto edges = mesh_edges(mesh);
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < colors.faces.size(); ++i) {
      const auto& nodes = colors.table.faces[colors.faces[i]].nodes;
      int curve = 0;
      bool degenerate = true;
      for (int32_t n : nodes) {
        if (out[n].kind == EntityKind::kCorner) continue;
        if (out[n].kind != EntityKind::kCurve || (curve && out[n].id != curve)) {
          degenerate = false;
          break;
        }
        curve = out[n].id;
      }
      if (!degenerate || !curve) continue;
      int32_t pick = -1;
      for (int32_t n : nodes) {
        if (out[n].kind != EntityKind::kCurve) continue;
        if (pick < 0 || color_count[n][colors.color[i]] < color_count[pick][colors.color[i]]) pick = n;
      }
      int best = colors.color[i], most = -1;
      for (auto [c, k] : color_count[pick])
        if (k > most || (k == most && c != colors.color[i])) {
          best = c;
          most = k;
        }
      out[pick] = {EntityKind::kSurface, best};
      ++rep.demoted;
      changed = true;
    }
    // Two curve nodes joined by an edge must not project onto nearly the
    // same point; the one that would move further returns to its surface.
    for (const auto& e : edges) {
      int32_t a = e[0], b = e[1];
      auto on_curve = [&](int32_t n) { return out[n].kind == EntityKind::kCurve || out[n].kind == EntityKind::kCorner; };
      if (!on_curve(a) || !on_curve(b)) continue;
      if (out[a].kind == EntityKind::kCurve && out[b].kind == EntityKind::kCurve && out[a].id != out[b].id) continue;
      if (out[a].kind == EntityKind::kCorner && out[b].kind == EntityKind::kCorner) continue;
      Vec3 pa = project_point(model, out[a], mesh.nodes[a]), pb = project_point(model, out[b], mesh.nodes[b]);
      if (distance(pa, pb) >= 0.25 * distance(mesh.nodes[a], mesh.nodes[b])) continue;
      double da = out[a].kind == EntityKind::kCurve ? distance(pa, mesh.nodes[a]) : -1;
      double db = out[b].kind == EntityKind::kCurve ? distance(pb, mesh.nodes[b]) : -1;
      int32_t pick = da > db || (da == db && a > b) ? a : b;
      int best = 0, most = -1;
      for (auto [c, cnt] : color_count[pick])
        if (cnt > most) {
          best = c;
          most = cnt;
        }
      out[pick] = {EntityKind::kSurface, best};
      ++rep.demoted;
      changed = true;
    }
  }
  if (report) *report = rep;
  return out;
}

Mesh project_to_entities(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model) {
  Mesh out = mesh;
  for (size_t n = 0; n < mesh.nodes.size(); ++n) out.nodes[n] = project_point(model, binding[n], mesh.nodes[n]);
  return out;
}

double max_binding_distance(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model) {
  double worst = 0;
  for (size_t n = 0; n < mesh.nodes.size(); ++n)
    if (binding[n].kind != EntityKind::kInterior)
      worst = std::max(worst, distance(mesh.nodes[n], project_point(model, binding[n], mesh.nodes[n])));
  return worst;
}

namespace {

// Arc length from the start of the curve to the point on it nearest p.
double curve_parameter(const GeometryModel& m, const Curve& c, const Vec3& p, double& length) {
  if (c.shape == CurveShape::kCircle) {
    length = 2 * M_PI * c.radius;
    Vec3 a = normalized(c.axis);
    Vec3 e1 = m.vertices.empty() || c.points.empty() ? cross(a, Vec3{1, 0, 0}) : m.vertices[c.points[0]] - c.center;
    e1 = normalized(e1 - a * dot(a, e1));
    Vec3 e2 = cross(a, e1);
    Vec3 v = p - c.center;
    double ang = std::atan2(dot(v, e2), dot(v, e1));
    if (ang < 0) ang += 2 * M_PI;
    return ang * c.radius;
  }
  size_t n = c.points.size();
  size_t segs = c.closed ? n : (n ? n - 1 : 0);
  length = 0;
  double best = INFINITY, at = 0;
  for (size_t i = 0; i < segs; ++i) {
    const Vec3& a = m.vertices[c.points[i]];
    const Vec3& b = m.vertices[c.points[(i + 1) % n]];
    Vec3 q = closest_on_segment(p, a, b);
    double d = distance(p, q);
    if (d < best) {
      best = d;
      at = length + distance(a, q);
    }
    length += distance(a, b);
  }
  return at;
}

}  // namespace

std::vector<CurveCoverage> curve_coverage(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model,
                                          double h) {
  std::vector<CurveCoverage> out;
  for (const Curve& c : model.curves) {
    CurveCoverage cov;
    cov.curve = c.id;
    curve_parameter(model, c, c.shape == CurveShape::kCircle ? c.center : Vec3{}, cov.length);
    cov.pieces = std::max(1, static_cast<int>(std::ceil(cov.length / h - 1e-9)));
    std::vector<uint8_t> hit(cov.pieces, 0);
    for (size_t n = 0; n < mesh.nodes.size(); ++n) {
      const Binding& b = binding[n];
      bool on = b.kind == EntityKind::kCurve && b.id == c.id;
      if (b.kind == EntityKind::kCorner) {
        const Corner* k = find_corner(model, b.id);
        on = k && std::count(k->surfaces.begin(), k->surfaces.end(), c.surfaces[0]) &&
             std::count(k->surfaces.begin(), k->surfaces.end(), c.surfaces[1]);
      }
      if (!on) continue;
      double len;
      double s = curve_parameter(model, c, mesh.nodes[n], len);
      int piece = std::clamp(static_cast<int>(s / cov.length * cov.pieces), 0, cov.pieces - 1);
      hit[piece] = 1;
    }
    for (uint8_t x : hit) cov.covered += x;
    out.push_back(cov);
  }
  return out;
}

DefeaturingReport check_defeaturing(const FaceColoring& colors, const GeometryModel& model) {
  std::set<int> used(colors.color.begin(), colors.color.end());
  DefeaturingReport rep;
  for (int id : model.surface_ids()) (used.count(id) ? rep.present : rep.neglected).push_back(id);
  return rep;
}

// ---------------------------------------------------------------- optimization

std::vector<double> cell_quality(const Mesh& mesh, const SjNormalization& norm) {
  std::vector<double> q(mesh.cells.size());
  for (size_t c = 0; c < mesh.cells.size(); ++c) q[c] = scaled_jacobian_or_invalid(mesh.cells[c], mesh.nodes, norm);
  return q;
}

namespace {

class Optimizer {
 public:
  Optimizer(Mesh& m, const EntityBinding& b, const GeometryModel& g, const OptimizeConfig& cfg)
      : mesh_(m), binding_(b), model_(g), cfg_(cfg), cells_of_(m.nodes.size()) {
    for (size_t c = 0; c < m.cells.size(); ++c)
      for (int32_t n : m.cells[c].nodes) cells_of_[n].push_back(static_cast<int32_t>(c));
    q_ = cell_quality(m, cfg.normalization);
    sorted_.insert(q_.begin(), q_.end());
  }

  double global_min() const { return sorted_.empty() ? 0.0 : *sorted_.begin(); }

  const std::vector<double>& quality() const { return q_; }

  bool movable(int32_t n) const { return binding_[n].kind != EntityKind::kCorner; }

  // Moves node n to p (projected onto its entity) unless one of its cells
  // would end below both its prior SJ and max(threshold, mesh minimum), or
  // `accept` objects. Returns true when moved.
  template <class Accept>
  bool try_move(int32_t n, Vec3 p, Accept&& accept) {
    if (!movable(n)) return false;
    p = project_point(model_, binding_[n], p);
    Vec3 old = mesh_.nodes[n];
    if (p == old) return false;
    mesh_.nodes[n] = p;
    scratch_.clear();
    bool worse = false;
    const double floor = std::max(cfg_.threshold, global_min());
    for (int32_t c : cells_of_[n]) {
      double s = scaled_jacobian_or_invalid(mesh_.cells[c], mesh_.nodes, cfg_.normalization);
      scratch_.push_back(s);
      worse |= s < std::min(q_[c], floor);
    }
    if (worse || !accept()) {
      mesh_.nodes[n] = old;
      return false;
    }
    for (size_t i = 0; i < scratch_.size(); ++i) {
      int32_t c = cells_of_[n][i];
      sorted_.erase(sorted_.find(q_[c]));
      sorted_.insert(scratch_[i]);
      q_[c] = scratch_[i];
    }
    return true;
  }

  // Trial SJ of cell c after the pending move (valid inside accept()).
  double trial(int32_t n, int32_t c) const {
    for (size_t i = 0; i < cells_of_[n].size(); ++i)
      if (cells_of_[n][i] == c) return scratch_[i];
    return q_[c];
  }

  Mesh& mesh_;
  const EntityBinding& binding_;
  const GeometryModel& model_;
  const OptimizeConfig& cfg_;
  std::vector<std::vector<int32_t>> cells_of_;
  std::vector<double> q_;
  std::vector<double> scratch_;
  std::multiset<double> sorted_;
};

double median_edge_length(const Mesh& m) {
  auto edges = mesh_edges(m);
  if (edges.empty()) return 1;
  std::vector<double> len;
  len.reserve(edges.size());
  for (auto& e : edges) len.push_back(distance(m.nodes[e[0]], m.nodes[e[1]]));
  std::nth_element(len.begin(), len.begin() + len.size() / 2, len.end());
  return len[len.size() / 2];
}

}  // namespace

Mesh optimize(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model, const OptimizeConfig& cfg,
              OptimizeReport* report) {
  if (binding.size() != mesh.nodes.size()) throw Error(ErrorCode::kInvalidInput, "binding does not match the mesh");
  Mesh out = mesh;
  OptimizeReport rep;
  Optimizer opt(out, binding, model, cfg);
  auto global_min = [&] { return opt.global_min(); };
  auto low_count = [&] {
    int k = 0;
    for (double s : opt.quality()) k += s < cfg.threshold;
    return k;
  };
  rep.min_sj_before = global_min();
  rep.low_cells_before = low_count();
  const double h = cfg.h > 0 ? cfg.h : median_edge_length(mesh);

  // Phase 1: boundary nodes move toward the mean of their boundary neighbors.
  std::vector<std::vector<int32_t>> ring(out.nodes.size());
  {
    FaceTable table = build_face_table(out);
    for (const auto& f : table.faces) {
      if (!f.boundary()) continue;
      size_t k = f.nodes.size();
      for (size_t i = 0; i < k; ++i) {
        ring[f.nodes[i]].push_back(f.nodes[(i + 1) % k]);
        ring[f.nodes[i]].push_back(f.nodes[(i + k - 1) % k]);
      }
    }
    for (auto& r : ring) {
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
    }
  }
  for (int sweep = 0; sweep < cfg.smoothing_sweeps; ++sweep) {
    int moved = 0;
    for (size_t n = 0; n < out.nodes.size(); ++n) {
      if (binding[n].kind == EntityKind::kInterior || ring[n].empty()) continue;
      Vec3 avg{};
      for (int32_t m : ring[n]) avg = avg + out.nodes[m];
      avg = avg / static_cast<double>(ring[n].size());
      if (opt.try_move(static_cast<int32_t>(n), avg, [] { return true; })) ++moved;
    }
    rep.surface_moves += moved;
    if (!moved) break;
  }

  // Phase 2: one low-quality cell at a time.
  std::vector<int32_t> low;
  for (size_t c = 0; c < out.cells.size(); ++c)
    if (opt.quality()[c] < cfg.threshold) low.push_back(static_cast<int32_t>(c));
  std::stable_sort(low.begin(), low.end(), [&](int32_t a, int32_t b) { return opt.quality()[a] < opt.quality()[b]; });
  static const Vec3 kDirs[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int32_t c : low) {
    double start = opt.quality()[c];
    if (start >= cfg.threshold) continue;
    double step = h / 16;
    for (int it = 0; it < cfg.max_iterations && opt.quality()[c] < cfg.threshold; ++it) {
      bool improved = false;
      for (int32_t n : out.cells[c].nodes)
        for (const Vec3& d : kDirs) {
          double cur = opt.quality()[c];
          if (opt.try_move(n, out.nodes[n] + d * step, [&] { return opt.trial(n, c) > cur; })) {
            improved = true;
            ++rep.volume_moves;
          }
        }
      if (!improved) step /= 2;
    }
    if (!(opt.quality()[c] > start)) rep.unimprovable.push_back(c);
  }
  rep.min_sj_after = global_min();
  rep.low_cells_after = low_count();
  if (report) *report = rep;
  return out;
}

}  // namespace retrench
