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

#include <random>
#include <set>

#include "retrench/mapping.hpp"
#include "retrench/mesh.hpp"
#include "support.hpp"

using namespace retrench;
using retrench::test::box;
using retrench::test::min_quality;

namespace {

struct Bound {
  Mesh mesh;
  GeometryModel model;
  FaceColoring colors;
  EntityBinding binding;
};

// An n^3 grid filling the unit cube, bound to the box model.
Bound unit_cube(int n, double tessellation = 0.1) {
  Bound b;
  b.model = make_box({0, 0, 0}, {1, 1, 1}, tessellation);
  b.mesh = box_grid(box({0, 0, 0}, {1, 1, 1}), 1.0 / n).mesh;
  b.colors = color_faces(b.mesh, b.model);
  b.binding = bind_nodes(b.mesh, b.colors, b.model);
  return b;
}

int expected_face_color(const Vec3& c) {
  for (int a = 0; a < 3; ++a) {
    if (std::abs(c[a]) < 1e-12) return 2 * a + 1;
    if (std::abs(c[a] - 1) < 1e-12) return 2 * a + 2;
  }
  return 0;
}

const MeshRun& drilled_run() {
  static const MeshRun run = [] {
    PipelineConfig cfg = load_config(std::string(RETRENCH_SOURCE_DIR) + "/data/cube_with_hole.yaml");
    MeshRun r;
    run_mesh(cfg, retrench::test::shipped_library(), retrench::test::layout(), r);
    return r;
  }();
  return run;
}

}  // namespace

TEST(ColorFaces, PlanarBoxGetsFaceIds) {
  Bound b = unit_cube(3);
  ASSERT_EQ(b.colors.faces.size(), 54u);
  EXPECT_EQ(b.colors.unmapped, 0);
  for (size_t i = 0; i < b.colors.faces.size(); ++i) {
    const FaceRecord& f = b.colors.table.faces[b.colors.faces[i]];
    Vec3 c{};
    for (int32_t n : f.nodes) c = c + b.mesh.nodes[n] * (1.0 / f.nodes.size());
    EXPECT_EQ(b.colors.color[i], expected_face_color(c));
  }
}

TEST(ColorFaces, HoleFacesAreCylinder) {
  const MeshRun& run = drilled_run();
  int on_hole = 0;
  for (size_t i = 0; i < run.colors.faces.size(); ++i) {
    const FaceRecord& f = run.colors.table.faces[run.colors.faces[i]];
    Vec3 c{};
    for (int32_t n : f.nodes) c = c + run.retrenched.nodes[n] * (1.0 / f.nodes.size());
    double r = std::hypot(c.x - 0.5, c.y - 0.5);
    if (r < 0.35 && c.z > 0.125 && c.z < 0.875) {  // away from the rims
      EXPECT_EQ(run.colors.color[i], 7);
      ++on_hole;
    }
  }
  EXPECT_GT(on_hole, 50);
}

TEST(ColorFaces, FarMeshFallsBackToNearest) {
  GeometryModel model = make_box({0, 0, 0}, {1, 1, 1}, 0.25);
  Mesh m = box_grid(box({5, 0.2, 0.2}, {5.5, 0.7, 0.7}), 0.5).mesh;
  FaceColoring c = color_faces(m, model);
  EXPECT_EQ(c.faces.size(), 6u);
  EXPECT_GT(c.unmapped + c.far_hits, 0);
  for (int col : c.color) EXPECT_GE(col, 1);
  // the face facing the box is nearest to the x-hi face
  for (size_t i = 0; i < c.faces.size(); ++i) {
    const FaceRecord& f = c.table.faces[c.faces[i]];
    bool at_x5 = true;
    for (int32_t n : f.nodes) at_x5 &= m.nodes[n].x == 5;
    if (at_x5) EXPECT_EQ(c.color[i], 2);
  }
}

TEST(BindNodes, EntityKindsOnGrid) {
  Bound b = unit_cube(2);
  ASSERT_EQ(b.binding.size(), b.mesh.nodes.size());
  int counts[4] = {0, 0, 0, 0};
  for (size_t n = 0; n < b.mesh.nodes.size(); ++n) {
    const Vec3& p = b.mesh.nodes[n];
    int extreme = 0;
    for (int a = 0; a < 3; ++a) extreme += (p[a] == 0 || p[a] == 1);
    EXPECT_EQ(static_cast<int>(b.binding[n].kind), extreme) << n;
    ++counts[extreme];
    if (extreme == 1) EXPECT_EQ(b.binding[n].id, expected_face_color(p));
    if (extreme == 3) EXPECT_EQ(p, b.model.corners[b.binding[n].id - 1].point);
  }
  EXPECT_EQ(counts[0], 1);
  EXPECT_EQ(counts[1], 6);
  EXPECT_EQ(counts[2], 12);
  EXPECT_EQ(counts[3], 8);
  // every box curve holds exactly one edge-midpoint node
  std::set<int> curves;
  for (const Binding& x : b.binding)
    if (x.kind == EntityKind::kCurve) curves.insert(x.id);
  EXPECT_EQ(curves.size(), 12u);
}

TEST(BindNodes, BoundaryNodesAreNeverInterior) {
  Bound b = unit_cube(4);
  FaceTable t = build_face_table(b.mesh);
  std::set<int32_t> bnd;
  for (int32_t n : boundary_nodes(b.mesh, t)) bnd.insert(n);
  for (size_t n = 0; n < b.mesh.nodes.size(); ++n)
    EXPECT_EQ(b.binding[n].kind != EntityKind::kInterior, bnd.count(n) > 0) << n;
}

TEST(Projection, IdempotentAndCornersExact) {
  const MeshRun& run = drilled_run();
  for (size_t n = 0; n < run.mesh.nodes.size(); ++n) {
    const Binding& b = run.binding[n];
    if (b.kind == EntityKind::kInterior) continue;
    const Vec3& p = run.mesh.nodes[n];
    Vec3 q = project_point(run.model, b, p);
    EXPECT_LE(distance(p, q), 1e-12) << n;
    EXPECT_LE(distance(q, project_point(run.model, b, q)), 1e-12) << n;
    if (b.kind == EntityKind::kCorner) {
      Vec3 c = run.model.corners[b.id - 1].point;
      EXPECT_EQ(p, c) << n;
    }
  }
}

TEST(Projection, HoleNodesNearAnalyticCylinder) {
  const MeshRun& run = drilled_run();
  const double h = run.precursor.h;
  int on_hole = 0, on_circles = 0;
  for (size_t n = 0; n < run.mesh.nodes.size(); ++n) {
    const Binding& b = run.binding[n];
    const Vec3& p = run.mesh.nodes[n];
    double r = std::hypot(p.x - 0.5, p.y - 0.5);
    if (b.kind == EntityKind::kSurface && b.id == 7) {
      EXPECT_LE(std::abs(r - 0.25), h / 40) << n;
      ++on_hole;
    }
    if (b.kind == EntityKind::kCurve && b.id >= 13) {
      EXPECT_LE(std::abs(r - 0.25), h / 40) << n;
      EXPECT_TRUE(p.z == 0 || p.z == 1) << n;
      ++on_circles;
    }
  }
  EXPECT_GT(on_hole, 0);
  EXPECT_GT(on_circles, 0);
  EXPECT_LE(run.max_binding_distance, h / 40);
}

TEST(CurveCoverage, DrilledCurvesCovered) {
  const MeshRun& run = drilled_run();
  ASSERT_EQ(run.coverage.size(), 14u);
  for (const CurveCoverage& c : run.coverage) {
    EXPECT_GT(c.pieces, 0);
    EXPECT_EQ(c.covered, c.pieces) << c.curve;
    EXPECT_LE(c.length / c.pieces, run.precursor.h + 1e-12);
  }
}

TEST(Defeaturing, TinySurfaceIsNeglected) {
  GeometryModel model = make_box({0, 0, 0}, {1, 1, 1}, 0.1);
  SurfaceInfo tiny;
  tiny.id = 9;
  model.surfaces.push_back(tiny);
  int retagged = 0;
  for (Triangle& t : model.triangles) {
    if (t.surface != 1) continue;
    bool near = true;
    for (int32_t v : t.v) near &= norm(model.vertices[v]) <= 0.15;
    if (near) t.surface = 9, ++retagged;
  }
  model.build();
  ASSERT_GT(retagged, 0);
  Mesh m = box_grid(box({0, 0, 0}, {1, 1, 1}), 0.5).mesh;
  DefeaturingReport r = check_defeaturing(color_faces(m, model), model);
  EXPECT_EQ(r.neglected, std::vector<int>{9});
  EXPECT_EQ(r.present, (std::vector<int>{1, 2, 3, 4, 5, 6}));
}

TEST(Defeaturing, EmptyModel) {
  GeometryModel model;
  model.build();
  DefeaturingReport r = check_defeaturing(FaceColoring{}, model);
  EXPECT_TRUE(r.present.empty());
  EXPECT_TRUE(r.neglected.empty());
}

TEST(Optimize, PerfectGridUnchanged) {
  Bound b = unit_cube(3);
  OptimizeReport rep;
  Mesh out = optimize(b.mesh, b.binding, b.model, {}, &rep);
  EXPECT_EQ(out.nodes, b.mesh.nodes);
  EXPECT_DOUBLE_EQ(rep.min_sj_after, 1.0);
  EXPECT_EQ(rep.low_cells_before, 0);
}

TEST(Optimize, ImprovesPerturbedGrid) {
  Bound b = unit_cube(4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.12, 0.12);
  Mesh perturbed = b.mesh;
  for (size_t n = 0; n < perturbed.nodes.size(); ++n)
    if (b.binding[n].kind == EntityKind::kInterior)
      perturbed.nodes[n] = perturbed.nodes[n] + Vec3{u(rng), u(rng), u(rng)};
  perturbed.nodes[31] = perturbed.nodes[31] + Vec3{0.1, 0.1, 0.1};
  OptimizeConfig cfg;
  cfg.threshold = 0.6;
  OptimizeReport rep;
  Mesh out = optimize(perturbed, b.binding, b.model, cfg, &rep);
  EXPECT_DOUBLE_EQ(rep.min_sj_before, min_quality(perturbed));
  EXPECT_DOUBLE_EQ(rep.min_sj_after, min_quality(out));
  EXPECT_GE(rep.min_sj_after, rep.min_sj_before);
  EXPECT_GT(rep.low_cells_before, 0);
  EXPECT_TRUE(rep.low_cells_after < rep.low_cells_before || !rep.unimprovable.empty());
  EXPECT_TRUE(validate_conformity(out).conforming());
  for (size_t n = 0; n < out.nodes.size(); ++n) {
    const Binding& bd = b.binding[n];
    if (bd.kind == EntityKind::kCorner) EXPECT_EQ(out.nodes[n], perturbed.nodes[n]);
    if (bd.kind != EntityKind::kInterior)
      EXPECT_LE(distance(out.nodes[n], project_point(b.model, bd, out.nodes[n])), 1e-12);
  }
}

TEST(Optimize, MonotoneOnRandomPerturbations) {
  Bound b = unit_cube(3);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    Mesh p = b.mesh;
    for (size_t n = 0; n < p.nodes.size(); ++n)
      if (b.binding[n].kind != EntityKind::kCorner)
        p.nodes[n] = project_point(b.model, b.binding[n], p.nodes[n] + Vec3{u(rng), u(rng), u(rng)});
    double before = min_quality(p);
    OptimizeConfig cfg;
    cfg.threshold = 0.9;
    Mesh out = optimize(p, b.binding, b.model, cfg);
    EXPECT_GE(min_quality(out), before) << trial;
  }
}

TEST(CellQuality, MatchesPerCellSj) {
  Mesh m = retrench::test::grid(2, 1, 1, 0.5);
  std::vector<double> q = cell_quality(m);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_DOUBLE_EQ(q[0], 1.0);
  EXPECT_DOUBLE_EQ(q[1], 1.0);
}
