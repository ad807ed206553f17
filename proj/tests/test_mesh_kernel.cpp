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


#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "retrench/error.hpp"
#include "retrench/mesh.hpp"
#include "support.hpp"

using namespace retrench;
using retrench::test::grid;

namespace {

Mesh single_tet() {
  Mesh m;
  m.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.cells = {Cell(CellKind::kTet, {0, 1, 2, 3})};
  return m;
}

std::multiset<FaceKey> face_keys(const FaceTable& t) {
  std::multiset<FaceKey> s;
  for (const FaceRecord& f : t.faces) s.insert(f.key);
  return s;
}

// Axis-aligned unit squares of an n^3 grid, counted directly.
std::pair<int, int> grid_face_counts(int n) {
  int boundary = 0, interior = 0;
  for (int axis = 0; axis < 3; ++axis)
    for (int plane = 0; plane <= n; ++plane)
      for (int k = 0; k < n * n; ++k) (plane == 0 || plane == n ? boundary : interior)++;
  return {boundary, interior};
}

}  // namespace

TEST(FaceTable, SingleTet) {
  FaceTable t = build_face_table(single_tet());
  EXPECT_EQ(t.boundary_count(), 4u);
  EXPECT_EQ(t.interior_count(), 0u);
}

TEST(FaceTable, TwoTetsSharingATriangle) {
  Mesh m = single_tet();
  m.nodes.push_back({1, 1, 1});
  m.cells.push_back(Cell(CellKind::kTet, {1, 2, 3, 4}));
  // second tet is on the other side of face (1,2,3); orient it positively
  if (scaled_jacobian(m.cells[1], m.nodes) < 0) m.cells[1] = Cell(CellKind::kTet, {2, 1, 3, 4});
  FaceTable t = build_face_table(m);
  EXPECT_EQ(t.boundary_count(), 6u);
  EXPECT_EQ(t.interior_count(), 1u);
}

TEST(FaceTable, HexGridCountsMatchDirectCount) {
  for (int n : {1, 2, 3}) {
    auto [boundary, interior] = grid_face_counts(n);
    FaceTable t = build_face_table(grid(n, n, n));
    EXPECT_EQ(t.boundary_count(), static_cast<size_t>(boundary)) << n;
    EXPECT_EQ(t.interior_count(), static_cast<size_t>(interior)) << n;
  }
  EXPECT_EQ(grid_face_counts(2), std::make_pair(24, 12));
}

TEST(FaceTable, IndependentOfCellOrder) {
  Mesh m = grid(3, 2, 2);
  auto ref = face_keys(build_face_table(m));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(m.cells.begin(), m.cells.end(), rng);
    EXPECT_EQ(face_keys(build_face_table(m)), ref);
  }
}

TEST(FaceTable, FaceUsesAddUp) {
  std::vector<Mesh> meshes{grid(2, 3, 2), grid(2, 2, 1)};
  for (const LibraryEntry& e : retrench::test::shipped_library().entries) {
    Mesh m;
    m.nodes = test::layout().positions;
    m.cells = e.tmpl.cells;
    meshes.push_back(m);
  }
  for (const Mesh& m : meshes) {
    if (!validate_conformity(m).conforming()) continue;
    FaceTable t = build_face_table(m);
    size_t uses = 0;
    for (const Cell& c : m.cells) uses += local_faces(c.kind).size();
    EXPECT_EQ(2 * t.interior_count() + t.boundary_count(), uses);
  }
}

TEST(FaceTable, DeterministicRecordOrder) {
  Mesh m = grid(2, 2, 2);
  FaceTable a = build_face_table(m), b = build_face_table(m);
  ASSERT_EQ(a.faces.size(), b.faces.size());
  for (size_t i = 0; i < a.faces.size(); ++i) EXPECT_EQ(a.faces[i].key, b.faces[i].key);
}

TEST(Conformity, GridIsConforming) {
  ConformityReport r = validate_conformity(grid(2, 2, 2));
  EXPECT_TRUE(r.conforming());
  EXPECT_EQ(r.face_components, 1);
  EXPECT_EQ(r.node_components, 1);
}

TEST(Conformity, RefinedNeighbourLeavesHangingNodes) {
  // [0,1]^3 split into 8 hexes next to an unsplit [1,2]x[0,1]^2
  Mesh fine = box_grid(test::box({0, 0, 0}, {1, 1, 1}), 0.5).mesh;
  Mesh coarse = box_grid(test::box({1, 0, 0}, {2, 1, 1}), 1.0).mesh;
  Mesh m = fine;
  std::vector<int32_t> remap;
  for (const Vec3& p : coarse.nodes) {
    auto it = std::find(m.nodes.begin(), m.nodes.end(), p);
    if (it == m.nodes.end()) {
      remap.push_back(static_cast<int32_t>(m.nodes.size()));
      m.nodes.push_back(p);
    } else {
      remap.push_back(static_cast<int32_t>(it - m.nodes.begin()));
    }
  }
  for (Cell c : coarse.cells) {
    for (int32_t& n : c.nodes) n = remap[n];
    m.cells.push_back(c);
  }
  ConformityReport r = validate_conformity(m);
  EXPECT_FALSE(r.conforming());
  EXPECT_FALSE(r.hanging_nodes.empty());
  std::set<int32_t> hanging;
  for (const HangingNode& h : r.hanging_nodes) hanging.insert(h.node);
  // the centre of the shared face and its four edge midpoints
  EXPECT_EQ(hanging.size(), 5u);
  for (int32_t n : hanging) EXPECT_DOUBLE_EQ(m.nodes[n].x, 1.0);
}

TEST(Conformity, NodeSharingCellsFormTwoFaceComponents) {
  Mesh m;
  m.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  m.cells = {Cell(CellKind::kTet, {0, 1, 2, 3}), Cell(CellKind::kTet, {0, 4, 5, 6})};
  for (Cell& c : m.cells)
    if (scaled_jacobian(c, m.nodes) < 0) std::swap(c.nodes[1], c.nodes[2]);
  ConformityReport r = validate_conformity(m);
  EXPECT_EQ(r.node_components, 1);
  EXPECT_EQ(r.face_components, 2);
  EXPECT_TRUE(r.conforming());
}

TEST(Conformity, NonManifoldFaceDetected) {
  Mesh m = single_tet();
  m.cells.push_back(m.cells[0]);
  m.cells.push_back(m.cells[0]);
  ConformityReport r = validate_conformity(m);
  EXPECT_FALSE(r.non_manifold_faces.empty());
  EXPECT_FALSE(r.conforming());
}

TEST(Valence, SingleHex) {
  ValenceStats v = node_valences(grid(1, 1, 1));
  ASSERT_EQ(v.valence.size(), 8u);
  for (int x : v.valence) EXPECT_EQ(x, 3);
  EXPECT_EQ(v.max, 3);
}

TEST(Valence, StructuredGridInteriorIsSix) {
  Mesh m = grid(3, 3, 3);
  ValenceStats v = node_valences(m);
  EXPECT_EQ(v.max, 6);
  for (size_t n = 0; n < m.nodes.size(); ++n) {
    const Vec3& p = m.nodes[n];
    bool interior = p.x > 0 && p.x < 3 && p.y > 0 && p.y < 3 && p.z > 0 && p.z < 3;
    if (interior) EXPECT_EQ(v.valence[n], 6);
  }
  // edges of an n^3 grid: 3 n (n+1)^2
  EXPECT_EQ(mesh_edges(m).size(), 3u * 3 * 16);
}

TEST(Valence, LibraryTemplates) {
  const TemplateLibrary& lib = test::shipped_library();
  const SubdivisionTemplate& full = lib.entries.back().tmpl;
  ASSERT_EQ(full.mask, 0xFF);
  Mesh m;
  m.nodes = test::layout().positions;
  m.cells = full.cells;
  EXPECT_EQ(node_valences(m).max, 6);
  for (const LibraryEntry& e : lib.entries) {
    Mesh t;
    t.nodes = test::layout().positions;
    t.cells = e.tmpl.cells;
    EXPECT_EQ(node_valences(t).max, e.tmpl.max_valence) << e.canonical.case_id;
  }
}

TEST(Mesh, CheckReferences) {
  Mesh m = single_tet();
  EXPECT_NO_THROW(m.check_references());
  m.cells[0].nodes[3] = 9;
  EXPECT_THROW(m.check_references(), Error);
  m.cells[0].nodes = {0, 1, 1, 2};
  EXPECT_THROW(m.check_references(), Error);
  m.cells[0].nodes = {0, 1, 2};
  EXPECT_THROW(m.check_references(), Error);
}

TEST(Mesh, BoundaryNodesOfGrid) {
  Mesh m = grid(3, 3, 3);
  FaceTable t = build_face_table(m);
  EXPECT_EQ(boundary_nodes(m, t).size(), 64u - 8u);
}

TEST(Vtk, RoundTrip) {
  Mesh m = grid(2, 1, 1, 0.5);
  m.nodes.push_back({2, 2, 2});
  m.nodes.push_back({2, 3, 2});
  m.nodes.push_back({3, 2, 2});
  m.nodes.push_back({2, 2, 3});
  int32_t b = static_cast<int32_t>(m.nodes.size()) - 4;
  m.cells.push_back(Cell(CellKind::kTet, {b, b + 2, b + 1, b + 3}));
  std::stringstream ss;
  write_vtk(ss, m, {{"q", std::vector<double>(m.cells.size(), 0.5)}});
  Mesh r = read_vtk(ss);
  EXPECT_EQ(r.cells, m.cells);
  ASSERT_EQ(r.nodes.size(), m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i) EXPECT_EQ(r.nodes[i], m.nodes[i]);
}

TEST(Vtk, MalformedInputIsParseError) {
  std::stringstream ss("# vtk DataFile Version 3.0\nx\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS 2 double\n0 0\n");
  try {
    read_vtk(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}
