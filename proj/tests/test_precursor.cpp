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

#include "retrench/error.hpp"
#include "support.hpp"

using namespace retrench;
using retrench::test::box;

namespace {

QuadMesh quad_grid(int n, double h = 1.0) {
  QuadMesh q;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) q.nodes.push_back({i * h, j * h, 0});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = j * (n + 1) + i;
      q.quads.push_back({a, a + 1, a + n + 2, a + n + 1});
    }
  return q;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

}  // namespace

TEST(BoxGrid, CellCounts) {
  EXPECT_EQ(box_grid(box({0, 0, 0}, {1, 1, 1}), 1.0).mesh.cells.size(), 1u);
  EXPECT_EQ(box_grid(box({0, 0, 0}, {1, 1, 1}), 0.5).mesh.cells.size(), 8u);
  PrecursorMesh p = box_grid(box({0, 0, 0}, {2, 1, 1}), 0.5);
  EXPECT_EQ(p.mesh.cells.size(), 16u);
  EXPECT_EQ(p.dims, (std::array<int, 3>{4, 2, 2}));
  EXPECT_EQ(p.h, 0.5);
}

TEST(BoxGrid, CoversBoxAndConforms) {
  Box3 b = box({-0.3, 0.1, 0.2}, {0.8, 0.65, 1.0});
  PrecursorMesh p = box_grid(b, 0.25);
  Box3 g = p.mesh.bounds();
  for (int a = 0; a < 3; ++a) {
    EXPECT_LE(g.lo[a], b.lo[a] + 1e-12);
    EXPECT_GE(g.hi[a], b.hi[a] - 1e-12);
    EXPECT_LT(g.hi[a] - g.lo[a], b.hi[a] - b.lo[a] + 2 * 0.25);
  }
  EXPECT_TRUE(validate_conformity(p.mesh).conforming());
  for (const Cell& c : p.mesh.cells) EXPECT_NEAR(scaled_jacobian(c, p.mesh.nodes), 1.0, 1e-12);
}

TEST(BoxGrid, Margin) {
  BoxGridOptions o;
  o.margin = 1;
  PrecursorMesh p = box_grid(box({0, 0, 0}, {1, 1, 1}), 0.5, o);
  EXPECT_EQ(p.mesh.cells.size(), 64u);
}

TEST(BoxGrid, Errors) {
  EXPECT_EQ(code_of([] { box_grid(box({0, 0, 0}, {1, 1, 1}), 0.0); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([] { box_grid(Box3{}, 0.5); }), ErrorCode::kInvalidInput);
  BoxGridOptions o;
  o.max_cells = 100;
  EXPECT_EQ(code_of([&] { box_grid(box({0, 0, 0}, {1, 1, 1}), 0.1, o); }), ErrorCode::kBudgetExceeded);
}

TEST(Extrude, Counts) {
  QuadMesh one = quad_grid(1);
  PrecursorMesh a = extrude(one, {0, 0, 1}, 3);
  EXPECT_EQ(a.mesh.cells.size(), 3u);
  EXPECT_EQ(a.mesh.nodes.size(), 4u * 4);
  QuadMesh two = quad_grid(2);
  PrecursorMesh b = extrude(two, {0, 0, 0.5}, 2);
  EXPECT_EQ(b.mesh.cells.size(), 8u);
  EXPECT_EQ(b.mesh.nodes.size(), 3u * two.nodes.size());
  EXPECT_TRUE(validate_conformity(b.mesh).conforming());
  for (const Cell& c : b.mesh.cells) EXPECT_GT(scaled_jacobian(c, b.mesh.nodes), 0.99);
}

TEST(Extrude, ReversedProfileStillPositive) {
  QuadMesh q = quad_grid(2);
  for (auto& quad : q.quads) std::swap(quad[1], quad[3]);
  PrecursorMesh p = extrude(q, {0, 0, 1}, 2);
  for (const Cell& c : p.mesh.cells) EXPECT_GT(scaled_jacobian(c, p.mesh.nodes), 0.99);
}

TEST(Extrude, InvalidProfiles) {
  QuadMesh q = quad_grid(1);
  EXPECT_EQ(code_of([&] { extrude(q, {0, 0, 1}, 0); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { extrude(q, {0, 0, 0}, 2); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { extrude(q, {1, 0, 0}, 2); }), ErrorCode::kInvalidProfile);
  QuadMesh bad = q;
  bad.quads[0][2] = 9;
  EXPECT_EQ(code_of([&] { extrude(bad, {0, 0, 1}, 2); }), ErrorCode::kInvalidProfile);
  bad = q;
  bad.quads[0][2] = bad.quads[0][0];
  EXPECT_EQ(code_of([&] { extrude(bad, {0, 0, 1}, 2); }), ErrorCode::kInvalidProfile);
  QuadMesh triple = quad_grid(1);
  triple.nodes.push_back({0.5, 2, 0});
  triple.nodes.push_back({0.5, -1, 0});
  triple.quads.push_back({0, 1, 4, 5});
  triple.quads.push_back({1, 0, 3, 4});
  EXPECT_EQ(code_of([&] { extrude(triple, {0, 0, 1}, 1); }), ErrorCode::kInvalidProfile);
}

TEST(Extrude, QuadFileRoundTrip) {
  QuadMesh q = quad_grid(3, 0.25);
  std::stringstream ss;
  write_vtk_quads(ss, q);
  QuadMesh r = read_vtk_quads(ss);
  EXPECT_EQ(r.quads, q.quads);
  EXPECT_EQ(r.nodes.size(), q.nodes.size());
}
