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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <atomic>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "retrench/error.hpp"
#include "retrench/exact.hpp"
#include "retrench/mesh.hpp"
#include "retrench/quality.hpp"
#include "retrench/subdivision.hpp"

namespace retrench {

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::kMaxMinSJ: return "max-min-sj";
    case Objective::kMinElementCount: return "min-element-count";
    case Objective::kMinMaxValence: return "min-max-valence";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  for (Objective o : {Objective::kMaxMinSJ, Objective::kMinElementCount, Objective::kMinMaxValence})
    if (objective_name(o) == name) return o;
  throw Error(ErrorCode::kParseError, "unknown objective '" + std::string(name) + "'");
}

void compute_template_stats(SubdivisionTemplate& t, const NodeLayout& layout, const SjNormalization& norm) {
  Mesh m{layout.positions, t.cells};
  t.min_sj = 1.0;
  for (const Cell& c : t.cells) t.min_sj = std::min(t.min_sj, scaled_jacobian_or_invalid(c, m.nodes, norm));
  t.max_valence = t.cells.empty() ? 0 : node_valences(m).max;
}

namespace {

constexpr int kCubeFace[3][2] = {{5, 3}, {2, 4}, {0, 1}};

std::vector<int> cube_planes_of(const IVec3& q, int64_t scale) {
  std::vector<int> out;
  for (int a = 0; a < 3; ++a) {
    if (q[a] == 0) out.push_back(kCubeFace[a][0]);
    if (q[a] == scale) out.push_back(kCubeFace[a][1]);
  }
  return out;
}

std::vector<int32_t> sorted_ids(std::vector<int32_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Same cyclic sequence up to rotation.
bool same_cycle(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
  if (a.size() != b.size()) return false;
  for (size_t r = 0; r < a.size(); ++r) {
    bool eq = true;
    for (size_t i = 0; i < a.size() && eq; ++i) eq = a[i] == b[(i + r) % b.size()];
    if (eq) return true;
  }
  return false;
}

std::vector<IVec3> face_normals(const Cell& c, const std::vector<IVec3>& P) {
  std::vector<IVec3> out;
  for (const LocalFace& f : local_faces(c.kind)) {
    const IVec3& a = P[c.nodes[f.v[0]]];
    IVec3 n = cross(P[c.nodes[f.v[1]]] - a, P[c.nodes[f.v[2]]] - a);
    if (f.size == 4) n = cross(P[c.nodes[f.v[2]]] - a, P[c.nodes[f.v[3]]] - P[c.nodes[f.v[1]]]);
    out.push_back(n);
  }
  return out;
}

// Separating-axis test on the vertex sets; true when interiors overlap.
bool interiors_overlap(const Cell& a, const Cell& b, const std::vector<IVec3>& P) {
  std::vector<IVec3> axes = face_normals(a, P);
  auto nb = face_normals(b, P);
  axes.insert(axes.end(), nb.begin(), nb.end());
  for (const auto& ea : local_edges(a.kind))
    for (const auto& eb : local_edges(b.kind)) {
      IVec3 x = cross(P[a.nodes[ea[1]]] - P[a.nodes[ea[0]]], P[b.nodes[eb[1]]] - P[b.nodes[eb[0]]]);
      if (!(x == IVec3{})) axes.push_back(x);
    }
  for (const IVec3& ax : axes) {
    if (ax == IVec3{}) continue;
    int64_t amin = INT64_MAX, amax = INT64_MIN, bmin = INT64_MAX, bmax = INT64_MIN;
    for (int32_t v : a.nodes) {
      int64_t d = dot(ax, P[v]);
      amin = std::min(amin, d);
      amax = std::max(amax, d);
    }
    for (int32_t v : b.nodes) {
      int64_t d = dot(ax, P[v]);
      bmin = std::min(bmin, d);
      bmax = std::max(bmax, d);
    }
    if (amax <= bmin || bmax <= amin) return false;
  }
  return true;
}

}  // namespace

ConstraintReport verify_template(const SubdivisionTemplate& t, const NodeLayout& layout,
                                 const FacePatternTable& patterns, bool face_connectivity) {
  ConstraintReport r;
  auto fail = [&](bool& flag, const std::string& msg) {
    flag = false;
    if (r.messages.size() < 32) r.messages.push_back(msg);
  };
  if (t.cells.empty()) {
    if (t.mask != 0) fail(r.face_matching, "empty template for a nonempty mask");
    return r;
  }
  Mesh mesh{layout.positions, t.cells};
  try {
    mesh.check_references();
  } catch (const Error& e) {
    fail(r.face_matching, e.what());
    return r;
  }
  const auto& P = layout.ipos;
  for (size_t i = 0; i < t.cells.size(); ++i)
    if (!(scaled_jacobian_or_invalid(t.cells[i], mesh.nodes) > 0))
      fail(r.positive, "cell " + std::to_string(i) + " is not positively oriented");

  // (a) face matching against neighbours and the face patterns.
  FaceTable table = build_face_table(mesh, true);
  for (int32_t f : table.non_manifold)
    fail(r.face_matching, "face with " + std::to_string(table.faces[f].owners.size()) + " owners");
  for (const FaceRecord& rec : table.faces) {
    if (rec.owners.size() != 2) continue;
    const FaceUse& u = rec.owners[1];
    const LocalFace& lf = local_faces(t.cells[u.cell].kind)[u.local_face];
    std::vector<int32_t> second;
    for (int k = lf.size - 1; k >= 0; --k) second.push_back(t.cells[u.cell].nodes[lf.v[k]]);
    if (!same_cycle(rec.nodes, second)) fail(r.face_matching, "shared face owners lie on the same side");
  }
  std::set<std::vector<int32_t>> pattern_faces;
  std::array<const FacePattern*, 6> pat;
  for (int f = 0; f < 6; ++f) {
    pat[f] = &patterns.for_mask(f, t.mask);
    for (const auto& poly : pat[f]->polygons) pattern_faces.insert(sorted_ids(poly));
  }
  std::set<int32_t> used;
  for (const Cell& c : t.cells) used.insert(c.nodes.begin(), c.nodes.end());
  for (int c = 0; c < 8; ++c) {
    bool kept = (t.mask >> c) & 1u;
    if (kept != (used.count(layout.corner_ids[c]) > 0))
      fail(r.face_matching, std::string("corner ") + std::to_string(c) + (kept ? " missing" : " present but dropped"));
  }
  for (int32_t v : used)
    for (int f : cube_planes_of(P[v], layout.scale))
      if (!std::binary_search(pat[f]->nodes.begin(), pat[f]->nodes.end(), v))
        fail(r.face_matching, "node " + std::to_string(v) + " on a cube face outside its pattern");
  std::set<std::vector<int32_t>> boundary_on_cube;
  std::vector<const FaceRecord*> hull_faces;
  for (const FaceRecord& rec : table.faces) {
    if (rec.owners.size() != 1) continue;
    std::vector<int> common = cube_planes_of(P[rec.nodes[0]], layout.scale);
    for (size_t k = 1; k < rec.nodes.size(); ++k) {
      auto pk = cube_planes_of(P[rec.nodes[k]], layout.scale);
      std::erase_if(common, [&](int f) { return std::find(pk.begin(), pk.end(), f) == pk.end(); });
    }
    if (common.empty()) {
      hull_faces.push_back(&rec);
      continue;
    }
    auto key = sorted_ids(rec.nodes);
    boundary_on_cube.insert(key);
    if (!pattern_faces.count(key)) fail(r.face_matching, "boundary face on a cube face is not in the pattern");
  }
  for (const auto& pf : pattern_faces)
    if (!boundary_on_cube.count(pf)) fail(r.face_matching, "pattern face not covered");

  // (b) convex hull: every inner boundary face supports all nodes, and
  // adjacent boundary faces meet convexly.
  for (const FaceRecord* rec : hull_faces) {
    exact::Plane pl = exact::plane_through(P[rec->nodes[0]], P[rec->nodes[1]], P[rec->nodes[2]]);
    for (int32_t v : used)
      if (exact::side(pl, P[v]) > 0) {
        fail(r.convex_hull, "boundary face does not support the template");
        break;
      }
  }
  std::map<std::pair<int32_t, int32_t>, std::vector<const FaceRecord*>> edge_faces;
  for (const FaceRecord& rec : table.faces) {
    if (rec.owners.size() != 1) continue;
    for (size_t k = 0; k < rec.nodes.size(); ++k) {
      int32_t a = rec.nodes[k], b = rec.nodes[(k + 1) % rec.nodes.size()];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(&rec);
    }
  }
  for (const auto& [edge, faces] : edge_faces) {
    if (faces.size() != 2) {
      fail(r.convex_hull, "boundary edge with " + std::to_string(faces.size()) + " boundary faces");
      continue;
    }
    std::vector<Vec3> fa, fb;
    for (int32_t v : faces[0]->nodes) fa.push_back(mesh.nodes[v]);
    for (int32_t v : faces[1]->nodes) fb.push_back(mesh.nodes[v]);
    if (!locally_convex(fa, fb, {mesh.nodes[edge.first], mesh.nodes[edge.second]}))
      fail(r.convex_hull, "boundary edge is reflex");
  }

  // (c) and (d)
  ConformityReport conf = validate_conformity(mesh);
  int comps = face_connectivity ? conf.face_components : conf.node_components;
  if (comps != 1) fail(r.connected, std::to_string(comps) + " components");
  if (!conf.hanging_nodes.empty()) fail(r.non_intersecting, "hanging nodes");
  if (!conf.hanging_edges.empty()) fail(r.non_intersecting, "hanging edges");
  for (size_t i = 0; i < t.cells.size(); ++i)
    for (size_t j = i + 1; j < t.cells.size(); ++j)
      if (interiors_overlap(t.cells[i], t.cells[j], P))
        fail(r.non_intersecting, "cells " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
  return r;
}

SubdivisionTemplate apply_transform(const SubdivisionTemplate& tmpl, const CubeTransform& t,
                                    const NodeLayout& layout) {
  SubdivisionTemplate out = tmpl;
  out.mask = t.apply(tmpl.mask);
  out.cells = transform_cells(tmpl.cells, induced_permutation(t, layout), t.orientation);
  for (Cell& c : out.cells) c = canonical_order(c);
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

std::optional<SubdivisionTemplate> TemplateLibrary::instantiate(NodeMask mask, const NodeLayout& layout) const {
  auto [cc, t] = canonicalize(mask);
  for (const LibraryEntry& e : entries)
    if (e.canonical.case_id == cc.case_id && e.status == CaseStatus::kSolved) {
      SubdivisionTemplate out = apply_transform(e.tmpl, t, layout);
      return out;
    }
  return std::nullopt;
}

TemplateLibrary solve_all_cases(const NodeLayout& layout, const Portfolio& portfolio,
                                const FacePatternTable& patterns, Objective objective,
                                const SolveAllOptions& opts) {
  TemplateLibrary lib;
  lib.layout_hash = layout.hash();
  lib.config = portfolio.config;
  lib.objective = objective;
  lib.style = patterns.style();
  for (const CanonicalCase& c : orbit_census()) {
    LibraryEntry e;
    e.canonical = c;
    e.tmpl.case_id = c.case_id;
    e.tmpl.mask = c.representative;
    e.tmpl.objective = objective;
    lib.entries.push_back(e);
  }
  auto run = [&](LibraryEntry& e) {
    auto t0 = std::chrono::steady_clock::now();
    SubdivisionProblem p{e.canonical.representative, &layout, &portfolio, &patterns, objective, true};
    try {
      e.tmpl = solve(p, opts.solve);
      e.status = CaseStatus::kSolved;
    } catch (const Error& err) {
      e.status = err.code() == ErrorCode::kInfeasible ? CaseStatus::kInfeasible : CaseStatus::kUnsolved;
    }
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  std::vector<LibraryEntry*> todo;
  for (LibraryEntry& e : lib.entries)
    if (opts.cases.empty() || std::find(opts.cases.begin(), opts.cases.end(), e.canonical.case_id) != opts.cases.end())
      todo.push_back(&e);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < todo.size();) run(*todo[i]);
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < std::max(1, opts.threads); ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return lib;
}

namespace {

constexpr const char* kLibraryMagic = "retrench-templates 1";

std::string_view status_name(CaseStatus s) {
  switch (s) {
    case CaseStatus::kSolved: return "solved";
    case CaseStatus::kInfeasible: return "infeasible";
    case CaseStatus::kUnsolved: return "unsolved";
  }
  return "?";
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_library(std::ostream& os, const TemplateLibrary& lib) {
  os << kLibraryMagic << '\n';
  os << "layout " << lib.layout_hash << '\n';
  os << quality_signature(lib.config) << '\n';
  os << "objective " << objective_name(lib.objective) << '\n';
  os << "patterns " << (lib.style == PatternStyle::kFull ? "full" : "reduced") << '\n';
  os << "cases " << lib.entries.size() << '\n';
  for (const LibraryEntry& e : lib.entries) {
    const SubdivisionTemplate& t = e.tmpl;
    os << "case " << e.canonical.case_id << " mask " << mask_string(e.canonical.representative) << " orbit "
       << e.canonical.orbit_size << " status " << status_name(e.status) << " optimal " << (t.optimal ? 1 : 0)
       << " min_sj " << g17(t.min_sj) << " elements " << t.element_count() << " max_valence " << t.max_valence
       << '\n';
    for (const Cell& c : t.cells) {
      os << kind_name(c.kind);
      for (int32_t v : c.nodes) os << ' ' << v;
      os << '\n';
    }
  }
}

TemplateLibrary read_library(std::istream& is, const NodeLayout& layout, const FacePatternTable& patterns) {
  TemplateLibrary lib;
  std::string line;
  int lineno = 0;
  auto next = [&]() {
    if (!std::getline(is, line)) throw Error(ErrorCode::kParseError, "template library truncated");
    ++lineno;
    return line;
  };
  auto bad = [&](const std::string& what) {
    return Error(ErrorCode::kParseError, "template library line " + std::to_string(lineno) + ": " + what);
  };
  if (next() != kLibraryMagic) throw bad("unknown header");
  std::string word;
  {
    std::istringstream ls(next());
    if (!(ls >> word >> lib.layout_hash) || word != "layout") throw bad("expected layout hash");
    if (lib.layout_hash != layout.hash()) throw Error(ErrorCode::kInvalidInput, "template library was built for another layout");
  }
  {
    std::istringstream ls(next());
    double v[8];
    std::string norm;
    if (!(ls >> word >> v[0] >> v[1] >> v[2] >> v[3] >> norm >> v[4] >> v[5] >> v[6] >> v[7]) || word != "quality")
      throw bad("expected quality line");
    lib.config.sj_min_tet = v[0];
    lib.config.sj_min_pyramid = v[1];
    lib.config.sj_min_prism = v[2];
    lib.config.sj_min_hex = v[3];
    lib.config.normalization = {v[4], v[5], v[6], v[7]};
  }
  {
    std::istringstream ls(next());
    if (!(ls >> word) || word != "objective" || !(ls >> word)) throw bad("expected objective");
    lib.objective = parse_objective(word);
  }
  {
    std::istringstream ls(next());
    if (!(ls >> word) || word != "patterns" || !(ls >> word)) throw bad("expected patterns");
    lib.style = word == "full" ? PatternStyle::kFull : PatternStyle::kReduced;
    if ((word != "full" && word != "reduced")) throw bad("unknown pattern style");
    if (lib.style != patterns.style()) throw Error(ErrorCode::kInvalidInput, "template library uses other face patterns");
  }
  size_t ncases;
  {
    std::istringstream ls(next());
    if (!(ls >> word >> ncases) || word != "cases") throw bad("expected case count");
  }
  bool pending = std::getline(is, line).operator bool();
  ++lineno;
  for (size_t i = 0; i < ncases; ++i) {
    if (!pending) throw bad("missing case");
    std::istringstream ls(line);
    LibraryEntry e;
    std::string mask, status;
    int optimal, elements;
    std::string k[8];
    if (!(ls >> k[0] >> e.canonical.case_id >> k[1] >> mask >> k[2] >> e.canonical.orbit_size >> k[3] >> status >>
          k[4] >> optimal >> k[5] >> e.tmpl.min_sj >> k[6] >> elements >> k[7] >> e.tmpl.max_valence) ||
        k[0] != "case" || mask.size() != 8)
      throw bad("malformed case line");
    NodeMask m = 0;
    for (int c = 0; c < 8; ++c)
      if (mask[c] == '1') m |= static_cast<NodeMask>(1u << c);
    e.canonical.representative = m;
    if (status == "solved") e.status = CaseStatus::kSolved;
    else if (status == "infeasible") e.status = CaseStatus::kInfeasible;
    else if (status == "unsolved") e.status = CaseStatus::kUnsolved;
    else throw bad("unknown status");
    e.tmpl.case_id = e.canonical.case_id;
    e.tmpl.mask = m;
    e.tmpl.optimal = optimal != 0;
    e.tmpl.objective = lib.objective;
    while ((pending = std::getline(is, line).operator bool())) {
      ++lineno;
      std::istringstream cl(line);
      if (!(cl >> word) || word == "case") break;
      Cell c;
      c.kind = parse_kind(word);
      int32_t id;
      while (cl >> id) c.nodes.push_back(id);
      if (static_cast<int>(c.nodes.size()) != node_count(c.kind)) throw bad("wrong node count");
      e.tmpl.cells.push_back(std::move(c));
    }
    if (static_cast<int>(e.tmpl.cells.size()) != elements) throw bad("element count mismatch");
    if (e.status == CaseStatus::kSolved) {
      ConstraintReport rep = verify_template(e.tmpl, layout, patterns);
      if (!rep.ok())
        throw Error(ErrorCode::kInvalidInput, "case " + std::to_string(e.canonical.case_id) + " fails verification: " +
                                                  (rep.messages.empty() ? "" : rep.messages.front()));
    }
    lib.entries.push_back(std::move(e));
  }
  if (pending && !line.empty()) throw bad("trailing content");
  return lib;
}

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {1, 8, 3, 0.35, 1},    {2, 12, 4, 0.46, 2},   {3, 12, 8, 0.26, 20},  {4, 24, 9, 0.21, 18},
      {5, 6, 5, 1.00, 4},    {6, 4, 6, 0.24, 6},    {7, 24, 13, 0.21, 36}, {8, 12, 12, 0.21, 41},
      {9, 8, 8, 0.29, 14},   {10, 8, 13, 0.25, 36}, {11, 12, 13, 0.21, 41}, {12, 24, 12, 0.21, 36},
      {13, 24, 9, 0.21, 28}, {14, 6, 6, 0.46, 8},   {15, 24, 12, 0.35, 29}, {16, 12, 6, 0.46, 8},
      {17, 2, 22, 0.35, 52}, {18, 8, 19, 0.35, 46}, {19, 12, 16, 0.35, 40}, {20, 4, 18, 0.35, 50},
      {21, 8, 12, 0.35, 29}, {22, 1, 6, 1.00, 8},
  };
  return rows;
}

std::vector<int> match_reference_rows(const TemplateLibrary& lib) {
  std::vector<int> out(lib.entries.size(), -1);
  std::map<int, std::vector<const LibraryEntry*>> cases;
  std::map<int, std::vector<const ReferenceRow*>> rows;
  for (const LibraryEntry& e : lib.entries)
    if (e.canonical.representative != 0) cases[e.canonical.orbit_size].push_back(&e);
  for (const ReferenceRow& r : reference_rows()) rows[r.orbit_size].push_back(&r);
  // When case order reproduces the reference orbit sizes row by row, rows
  // are taken as numbered by representative mask.
  bool aligned = lib.entries.size() == reference_rows().size() + 1;
  for (size_t i = 0; aligned && i < reference_rows().size(); ++i)
    aligned = lib.entries[i + 1].canonical.orbit_size == reference_rows()[i].orbit_size;
  if (aligned) {
    for (size_t i = 1; i < lib.entries.size(); ++i) out[i] = reference_rows()[i - 1].row;
    return out;
  }
  auto score = [](const LibraryEntry* e) { return e->status == CaseStatus::kSolved ? e->tmpl.min_sj : -2.0; };
  for (auto& [size, list] : cases) {
    std::stable_sort(list.begin(), list.end(), [&](auto* a, auto* b) { return score(a) > score(b); });
    auto& rs = rows[size];
    std::stable_sort(rs.begin(), rs.end(), [](auto* a, auto* b) { return a->min_sj > b->min_sj; });
    for (size_t i = 0; i < list.size() && i < rs.size(); ++i)
      out[list[i] - lib.entries.data()] = rs[i]->row;
  }
  return out;
}

std::string format_case_report(const TemplateLibrary& lib) {
  std::ostringstream os;
  auto rows = match_reference_rows(lib);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-5s %-9s %6s %8s %8s %9s %-11s %8s %4s\n", "case", "mask", "orbit", "valence",
                "min_sj", "elements", "status", "optimal", "row");
  os << buf;
  for (size_t i = 0; i < lib.entries.size(); ++i) {
    const LibraryEntry& e = lib.entries[i];
    std::snprintf(buf, sizeof(buf), "%-5d %-9s %6d %8d %8.3f %9d %-11s %8s %4s\n", e.canonical.case_id,
                  mask_string(e.canonical.representative).c_str(), e.canonical.orbit_size, e.tmpl.max_valence,
                  e.tmpl.min_sj, e.tmpl.element_count(), std::string(status_name(e.status)).c_str(),
                  e.tmpl.optimal ? "yes" : "no", rows[i] < 0 ? "-" : std::to_string(rows[i]).c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace retrench
