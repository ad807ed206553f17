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

#include "retrench/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "retrench/error.hpp"

namespace retrench {

Box3 Mesh::bounds() const {
  Box3 b;
  for (const Vec3& p : nodes) b.expand(p);
  return b;
}

double Mesh::eps_geom() const {
  double d = bounds().diagonal();
  return 1e-9 * (d > 0 ? d : 1.0);
}

void Mesh::check_references() const {
  for (size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    if (static_cast<int>(cell.nodes.size()) != node_count(cell.kind))
      throw Error(ErrorCode::kInvalidInput, "cell " + std::to_string(c) + " has wrong node count");
    for (size_t i = 0; i < cell.nodes.size(); ++i) {
      int32_t n = cell.nodes[i];
      if (n < 0 || n >= static_cast<int32_t>(nodes.size()))
        throw Error(ErrorCode::kInvalidInput, "cell " + std::to_string(c) + " references node " +
                                                  std::to_string(n));
      for (size_t j = 0; j < i; ++j)
        if (cell.nodes[j] == n)
          throw Error(ErrorCode::kInvalidInput,
                      "cell " + std::to_string(c) + " repeats node " + std::to_string(n));
    }
  }
}

FaceKey FaceKey::from(const int32_t* nodes, int n) {
  FaceKey k;
  for (int i = 0; i < n; ++i) k.ids[i] = nodes[i];
  std::sort(k.ids.begin(), k.ids.begin() + n);
  return k;
}

size_t FaceTable::boundary_count() const {
  return std::count_if(faces.begin(), faces.end(), [](const FaceRecord& f) { return f.owners.size() == 1; });
}

size_t FaceTable::interior_count() const {
  return std::count_if(faces.begin(), faces.end(), [](const FaceRecord& f) { return f.owners.size() == 2; });
}

FaceTable build_face_table(const Mesh& mesh, bool collect_non_manifold) {
  FaceTable table;
  table.index.reserve(mesh.cells.size() * 4);
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const Cell& cell = mesh.cells[c];
    auto faces = local_faces(cell.kind);
    for (size_t f = 0; f < faces.size(); ++f) {
      int32_t ids[4];
      for (int i = 0; i < faces[f].size; ++i) ids[i] = cell.nodes[faces[f].v[i]];
      FaceKey key = FaceKey::from(ids, faces[f].size);
      auto [it, inserted] = table.index.try_emplace(key, static_cast<int32_t>(table.faces.size()));
      if (inserted) {
        FaceRecord rec;
        rec.key = key;
        rec.nodes.assign(ids, ids + faces[f].size);
        table.faces.push_back(std::move(rec));
      }
      table.faces[it->second].owners.push_back({static_cast<int32_t>(c), static_cast<uint8_t>(f)});
    }
  }
  for (size_t i = 0; i < table.faces.size(); ++i) {
    if (table.faces[i].owners.size() > 2) {
      if (!collect_non_manifold) {
        std::ostringstream os;
        os << "face";
        for (int32_t n : table.faces[i].nodes) os << ' ' << n;
        os << " has " << table.faces[i].owners.size() << " owners";
        throw Error(ErrorCode::kNonManifoldFace, os.str());
      }
      table.non_manifold.push_back(static_cast<int32_t>(i));
    }
  }
  return table;
}

namespace {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Closest point on triangle (Ericson, Real-Time Collision Detection 5.1.5).
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return distance(p, a);
  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return distance(p, b);
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return distance(p, a + ab * (d1 / (d1 - d3)));
  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return distance(p, c);
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return distance(p, a + ac * (d2 / (d2 - d6)));
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return distance(p, b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))));
  double denom = 1.0 / (va + vb + vc);
  return distance(p, a + ab * (vb * denom) + ac * (vc * denom));
}

double point_face_distance(const Vec3& p, const Mesh& mesh, const std::vector<int32_t>& f) {
  const Vec3& a = mesh.nodes[f[0]];
  double d = point_triangle_distance(p, a, mesh.nodes[f[1]], mesh.nodes[f[2]]);
  if (f.size() == 4) d = std::min(d, point_triangle_distance(p, a, mesh.nodes[f[2]], mesh.nodes[f[3]]));
  return d;
}

struct SpatialHash {
  double cell = 1.0;
  Vec3 origin;
  std::unordered_map<int64_t, std::vector<int32_t>> buckets;

  int64_t key(int64_t i, int64_t j, int64_t k) const {
    return (i & 0x1fffff) | ((j & 0x1fffff) << 21) | ((k & 0x1fffff) << 42);
  }
  std::array<int64_t, 3> coord(const Vec3& p) const {
    return {static_cast<int64_t>(std::floor((p.x - origin.x) / cell)),
            static_cast<int64_t>(std::floor((p.y - origin.y) / cell)),
            static_cast<int64_t>(std::floor((p.z - origin.z) / cell))};
  }
  void insert(const Box3& b, int32_t id) {
    auto lo = coord(b.lo), hi = coord(b.hi);
    for (int64_t i = lo[0]; i <= hi[0]; ++i)
      for (int64_t j = lo[1]; j <= hi[1]; ++j)
        for (int64_t k = lo[2]; k <= hi[2]; ++k) buckets[key(i, j, k)].push_back(id);
  }
  const std::vector<int32_t>* find(const Vec3& p) const {
    auto c = coord(p);
    auto it = buckets.find(key(c[0], c[1], c[2]));
    return it == buckets.end() ? nullptr : &it->second;
  }
};

int count_components(size_t n, const std::vector<std::pair<int32_t, int32_t>>& links) {
  std::vector<int32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int comps = static_cast<int>(n);
  for (auto [a, b] : links) {
    int32_t ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --comps;
    }
  }
  return comps;
}

}  // namespace

ConformityReport validate_conformity(const Mesh& mesh, double eps) {
  if (eps <= 0) eps = mesh.eps_geom();
  ConformityReport report;
  FaceTable table = build_face_table(mesh, true);
  report.non_manifold_faces = table.non_manifold;

  // Hanging nodes and edges only occur against boundary-or-interior faces that
  // do not reference the node; bucket faces by their padded bounding boxes.
  SpatialHash hash;
  Box3 all = mesh.bounds();
  hash.origin = all.lo;
  double total_edge = 0;
  size_t nedge = 0;
  std::vector<Box3> face_boxes(table.faces.size());
  for (size_t f = 0; f < table.faces.size(); ++f) {
    const auto& ids = table.faces[f].nodes;
    for (size_t i = 0; i < ids.size(); ++i) {
      face_boxes[f].expand(mesh.nodes[ids[i]]);
      total_edge += distance(mesh.nodes[ids[i]], mesh.nodes[ids[(i + 1) % ids.size()]]);
      ++nedge;
    }
  }
  hash.cell = nedge ? std::max(total_edge / nedge, 4 * eps) : 1.0;
  for (size_t f = 0; f < table.faces.size(); ++f) {
    Box3 b = face_boxes[f];
    b.lo -= Vec3{eps, eps, eps};
    b.hi += Vec3{eps, eps, eps};
    hash.insert(b, static_cast<int32_t>(f));
  }

  auto on_face = [&](const Vec3& p, int32_t f) {
    const Box3& b = face_boxes[f];
    if (p.x < b.lo.x - eps || p.y < b.lo.y - eps || p.z < b.lo.z - eps || p.x > b.hi.x + eps ||
        p.y > b.hi.y + eps || p.z > b.hi.z + eps)
      return false;
    return point_face_distance(p, mesh, table.faces[f].nodes) <= eps;
  };

  std::vector<char> used(mesh.nodes.size(), 0);
  for (const Cell& c : mesh.cells)
    for (int32_t n : c.nodes) used[n] = 1;
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    if (!used[n]) continue;
    const auto* cand = hash.find(mesh.nodes[n]);
    if (!cand) continue;
    for (int32_t f : *cand) {
      const auto& ids = table.faces[f].nodes;
      if (std::find(ids.begin(), ids.end(), static_cast<int32_t>(n)) != ids.end()) continue;
      if (on_face(mesh.nodes[n], f)) report.hanging_nodes.push_back({static_cast<int32_t>(n), f});
    }
  }

  for (const auto& e : mesh_edges(mesh)) {
    Vec3 mid = (mesh.nodes[e[0]] + mesh.nodes[e[1]]) * 0.5;
    const auto* cand = hash.find(mid);
    if (!cand) continue;
    for (int32_t f : *cand) {
      const auto& ids = table.faces[f].nodes;
      bool has0 = std::find(ids.begin(), ids.end(), e[0]) != ids.end();
      bool has1 = std::find(ids.begin(), ids.end(), e[1]) != ids.end();
      if (has0 && has1) {
        // a face diagonal is hanging; a face side is not
        size_t i0 = std::find(ids.begin(), ids.end(), e[0]) - ids.begin();
        size_t i1 = std::find(ids.begin(), ids.end(), e[1]) - ids.begin();
        size_t gap = (i0 + ids.size() - i1) % ids.size();
        if (gap == 1 || gap == ids.size() - 1) continue;
      }
      if (on_face(mesh.nodes[e[0]], f) && on_face(mesh.nodes[e[1]], f) && on_face(mid, f))
        report.hanging_edges.push_back({e, f});
    }
  }

  std::vector<std::pair<int32_t, int32_t>> face_links, node_links;
  for (const auto& rec : table.faces)
    for (size_t i = 1; i < rec.owners.size(); ++i)
      face_links.push_back({rec.owners[0].cell, rec.owners[i].cell});
  std::vector<int32_t> first_cell(mesh.nodes.size(), -1);
  for (size_t c = 0; c < mesh.cells.size(); ++c)
    for (int32_t n : mesh.cells[c].nodes) {
      if (first_cell[n] < 0)
        first_cell[n] = static_cast<int32_t>(c);
      else
        node_links.push_back({first_cell[n], static_cast<int32_t>(c)});
    }
  report.face_components = count_components(mesh.cells.size(), face_links);
  report.node_components = count_components(mesh.cells.size(), node_links);
  return report;
}

std::string ConformityReport::summary() const {
  std::ostringstream os;
  os << "non_manifold_faces " << non_manifold_faces.size() << "\n"
     << "hanging_nodes " << hanging_nodes.size() << "\n"
     << "hanging_edges " << hanging_edges.size() << "\n"
     << "face_components " << face_components << "\n"
     << "node_components " << node_components << "\n"
     << "conforming " << (conforming() ? "yes" : "no") << "\n";
  return os.str();
}

std::vector<std::array<int32_t, 2>> mesh_edges(const Mesh& mesh) {
  std::vector<std::array<int32_t, 2>> edges;
  for (const Cell& c : mesh.cells)
    for (const auto& e : local_edges(c.kind)) {
      int32_t a = c.nodes[e[0]], b = c.nodes[e[1]];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

ValenceStats node_valences(const Mesh& mesh) {
  ValenceStats s;
  s.valence.assign(mesh.nodes.size(), 0);
  for (const auto& e : mesh_edges(mesh)) {
    ++s.valence[e[0]];
    ++s.valence[e[1]];
  }
  for (int v : s.valence) s.max = std::max(s.max, v);
  return s;
}

std::vector<int32_t> boundary_nodes(const Mesh& mesh, const FaceTable& table) {
  std::vector<char> on(mesh.nodes.size(), 0);
  for (const auto& f : table.faces)
    if (f.boundary())
      for (int32_t n : f.nodes) on[n] = 1;
  std::vector<int32_t> out;
  for (size_t i = 0; i < on.size(); ++i)
    if (on[i]) out.push_back(static_cast<int32_t>(i));
  return out;
}

}  // namespace retrench
