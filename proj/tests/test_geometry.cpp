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
#include <sstream>

#include "retrench/error.hpp"
#include "retrench/geometry.hpp"
#include "support.hpp"

using namespace retrench;

namespace {

const GeometryModel& drilled() {
  static const GeometryModel m = [] {
    BoxMinusCylinder spec;
    spec.tessellation = 0.05;
    return make_box_minus_cylinder(spec);
  }();
  return m;
}

bool same_hit(const std::optional<RayHit>& a, const std::optional<RayHit>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->triangle == b->triangle || std::abs(std::abs(a->t) - std::abs(b->t)) <= 1e-12;
}

}  // namespace

TEST(Generators, DrilledBlockCensus) {
  const GeometryModel& m = drilled();
  EXPECT_EQ(m.surface_ids(), (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(m.curves.size(), 14u);
  EXPECT_EQ(m.corners.size(), 8u);
  const SurfaceInfo* cyl = m.surface(7);
  ASSERT_NE(cyl, nullptr);
  EXPECT_EQ(cyl->shape, SurfaceShape::kCylinder);
  EXPECT_DOUBLE_EQ(cyl->radius, 0.25);
  int circles = 0;
  for (const Curve& c : m.curves) {
    if (c.shape != CurveShape::kCircle) continue;
    ++circles;
    EXPECT_TRUE(c.closed);
    EXPECT_TRUE(c.surfaces[0] == 7 || c.surfaces[1] == 7);
  }
  EXPECT_EQ(circles, 2);
}

TEST(Generators, WatertightWithExpectedGenus) {
  EXPECT_TRUE(watertight(drilled()));
  EXPECT_EQ(euler_characteristic(drilled()), 0);  // genus 1
  GeometryModel box = make_box({0, 0, 0}, {2, 1, 1}, 0.2);
  EXPECT_TRUE(watertight(box));
  EXPECT_EQ(euler_characteristic(box), 2);
  for (int axis = 0; axis < 3; ++axis) {
    BoxMinusCylinder spec;
    spec.axis = axis;
    spec.size = {1.0, 1.2, 1.4};
    spec.tessellation = 0.1;
    GeometryModel m = make_box_minus_cylinder(spec);
    EXPECT_TRUE(watertight(m)) << axis;
    EXPECT_EQ(euler_characteristic(m), 0) << axis;
  }
}

TEST(Generators, OutwardOrientation) {
  // the signed volume of a closed outward-oriented shell is positive
  for (const GeometryModel* m : {&drilled()}) {
    double v = 0;
    for (const Triangle& t : m->triangles)
      v += triple(m->vertices[t.v[0]], m->vertices[t.v[1]], m->vertices[t.v[2]]) / 6;
    EXPECT_NEAR(v, 1.0 - M_PI * 0.25 * 0.25, 0.01);
  }
}

TEST(Raycast, MatchesBruteForceOnRandomRays) {
  const GeometryModel& m = drilled();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  std::normal_distribution<double> g;
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 o{u(rng), u(rng), u(rng)};
    Vec3 d = normalized(Vec3{g(rng), g(rng), g(rng)});
    auto a = raycast_first(m, o, d), b = raycast_first_brute(m, o, d);
    EXPECT_TRUE(same_hit(a, b)) << i;
    hits += a.has_value();
  }
  EXPECT_GT(hits, 300);
}

TEST(Raycast, FaceCentreOutward) {
  const GeometryModel& m = drilled();
  auto hit = raycast_first(m, {1.0, 0.1, 0.5}, {1, 0, 0});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->surface, 2);
  EXPECT_NEAR(hit->t, 0.0, 1e-12);
  hit = raycast_first(m, {0.2, 0.1, 0.0}, {0, 0, -1});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->surface, 5);
}

TEST(Raycast, InsideHoleTowardAxisHitsCylinder) {
  const GeometryModel& m = drilled();
  // rays are lines; from the axis the nearest wall is at distance r either
  // way, and the inscribed wall lies within the sagitta of a 0.05 chord
  const double r = 0.25, sag = 0.05 * 0.05 / (8 * r);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI), z(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    double a = ang(rng), zz = z(rng);
    Vec3 dir{std::cos(a), std::sin(a), 0};
    auto hit = raycast_first(m, Vec3{0.5, 0.5, zz}, dir);
    ASSERT_TRUE(hit.has_value());
    EXPECT_EQ(hit->surface, 7);
    EXPECT_NEAR(std::abs(hit->t), r, sag + 1e-9);
    // and from just inside the hole, looking back at the axis
    Vec3 start = Vec3{0.5, 0.5, zz} + dir * (0.2);
    auto back = raycast_first(m, start, -dir);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->surface, 7);
  }
}

TEST(Raycast, GrazingEdgeRayIsSafe) {
  const GeometryModel& m = drilled();
  for (double eps : {0.0, 1e-13, 1e-10, 1e-7}) {
    auto hit = raycast_first(m, {1.0 + eps, -0.5, 1.0 - eps}, {0, 1, 0});
    if (hit) {
      EXPECT_NEAR(std::abs(hit->t), 0.5, 1e-6) << eps;
      EXPECT_TRUE(hit->surface == 2 || hit->surface == 3 || hit->surface == 6) << eps;
    }
    auto hit2 = raycast_first(m, {1.0 - eps, 1.0 - eps, 2.0}, {0, 0, -1});
    ASSERT_TRUE(hit2.has_value());
    std::set<int> ok{2, 4, 6};
    EXPECT_TRUE(ok.count(hit2->surface)) << eps;
  }
}

TEST(PointInside, Examples) {
  const GeometryModel& m = drilled();
  EXPECT_TRUE(point_inside(m, {0.1, 0.1, 0.5}));
  EXPECT_FALSE(point_inside(m, {0.5, 0.5, 0.5}));
  EXPECT_FALSE(point_inside(m, {0.6, 0.55, 0.1}));
  EXPECT_TRUE(point_inside(m, {1.0, 0.3, 0.7}));   // on a planar face
  EXPECT_TRUE(point_inside(m, {0.0, 0.0, 0.0}));   // a corner
  EXPECT_FALSE(point_inside(m, {1.5, 0.5, 0.5}));
  EXPECT_FALSE(point_inside(m, {0.5, 0.5, -0.01}));
}

TEST(PointInside, SeedDoesNotChangeAnswers) {
  GeometryModel a = drilled(), b = drilled();
  b.seed = 12345;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (int i = 0; i < 300; ++i) {
    Vec3 p{u(rng), u(rng), u(rng)};
    EXPECT_EQ(point_inside(a, p), point_inside(b, p));
  }
}

TEST(PointInside, OpenShellIsRejected) {
  GeometryModel m = make_box({0, 0, 0}, {1, 1, 1}, 0.25);
  m.triangles.pop_back();
  m.build();
  EXPECT_FALSE(watertight(m));
  try {
    for (double x : {0.37, 0.61, 0.83}) point_inside(m, {x, 0.52, 0.41});
    SUCCEED();  // rays may all miss the gap
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonWatertight);
  }
}

TEST(ClosestPoint, MatchesBruteForce) {
  const GeometryModel& m = drilled();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.3, 1.3);
  for (int i = 0; i < 200; ++i) {
    Vec3 p{u(rng), u(rng), u(rng)};
    double best = INFINITY;
    for (const Triangle& t : m.triangles)
      best = std::min(best, distance(p, closest_point_on_triangle(p, m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]])));
    ClosestPoint c = closest_point(m, p);
    EXPECT_NEAR(c.distance, best, 1e-12);
    ClosestPoint s = closest_point(m, p, 7);
    EXPECT_EQ(m.triangles[s.triangle].surface, 7);
    EXPECT_GE(s.distance, c.distance - 1e-12);
  }
}

TEST(ClosestPoint, TriangleRegions) {
  Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
  EXPECT_EQ(closest_point_on_triangle({-1, -1, 1}, a, b, c), a);
  EXPECT_EQ(closest_point_on_triangle({2, -0.5, 0}, a, b, c), b);
  Vec3 f = closest_point_on_triangle({0.2, 0.2, 3}, a, b, c);
  EXPECT_NEAR(f.x, 0.2, 1e-15);
  EXPECT_NEAR(f.y, 0.2, 1e-15);
  EXPECT_EQ(f.z, 0.0);
  Vec3 e = closest_point_on_triangle({1, 1, 0}, a, b, c);
  EXPECT_NEAR(e.x, 0.5, 1e-15);
  EXPECT_NEAR(e.y, 0.5, 1e-15);
}

TEST(GeometryIo, RoundTrip) {
  const GeometryModel& m = drilled();
  std::stringstream stl, ent;
  write_tagged_stl(stl, m);
  write_entities(ent, m);
  GeometryModel r = read_geometry(stl, &ent);
  ASSERT_EQ(r.triangles.size(), m.triangles.size());
  EXPECT_EQ(r.surface_ids(), m.surface_ids());
  ASSERT_EQ(r.curves.size(), m.curves.size());
  for (size_t i = 0; i < m.curves.size(); ++i) {
    EXPECT_EQ(r.curves[i].id, m.curves[i].id);
    EXPECT_EQ(r.curves[i].points.size(), m.curves[i].points.size());
    EXPECT_EQ(r.curves[i].shape, m.curves[i].shape);
    for (size_t k = 0; k < m.curves[i].points.size(); ++k)
      EXPECT_EQ(r.vertices[r.curves[i].points[k]], m.vertices[m.curves[i].points[k]]);
  }
  ASSERT_EQ(r.corners.size(), m.corners.size());
  for (size_t i = 0; i < m.corners.size(); ++i) EXPECT_EQ(r.corners[i].point, m.corners[i].point);
  EXPECT_TRUE(watertight(r));
  EXPECT_EQ(r.surface(7)->shape, SurfaceShape::kCylinder);
}

TEST(GeometryIo, ParseErrors) {
  std::stringstream bad("solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\n");
  try {
    read_geometry(bad, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
  EXPECT_THROW(read_geometry_files("/nonexistent.stl", ""), Error);
}
