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

#include <map>
#include <set>

#include "retrench/error.hpp"
#include "retrench/symmetry.hpp"
#include "support.hpp"

using namespace retrench;
using retrench::test::layout;

namespace {

Portfolio tet_portfolio(const NodeLayout& l) {
  EnumerationOptions o;
  o.kinds = {true, false, false, false};
  return enumerate_portfolio(l, QualityConfig{}, o);
}

// Non-coplanar 4-subsets, counted with integer triple products.
uint64_t tet_oracle(const NodeLayout& l) {
  uint64_t n = 0;
  const int s = static_cast<int>(l.size());
  for (int a = 0; a < s; ++a)
    for (int b = a + 1; b < s; ++b)
      for (int c = b + 1; c < s; ++c)
        for (int d = c + 1; d < s; ++d)
          n += triple(l.ipos[b] - l.ipos[a], l.ipos[c] - l.ipos[a], l.ipos[d] - l.ipos[a]) != 0;
  return n;
}

std::vector<int32_t> sorted_nodes(const CandidateElement& e) {
  std::vector<int32_t> v(e.nodes.begin(), e.nodes.begin() + e.size());
  std::sort(v.begin(), v.end());
  return v;
}

double volume(const NodeLayout& l, const CandidateElement& e) {
  Vec3 c{};
  for (int i = 0; i < e.size(); ++i) c += l.positions[e.nodes[i]];
  c = c / e.size();
  double v = 0;
  for (const auto& f : faces_of(e))
    for (size_t k = 1; k + 1 < f.size(); ++k)
      v += std::abs(triple(l.positions[f[0]] - c, l.positions[f[k]] - c, l.positions[f[k + 1]] - c)) / 6;
  return v;
}

// Orderings of the 8 cube corners with all corner Jacobians positive, divided
// by the 24 orientation-preserving relabelings of one hex.
uint64_t corner_hex_oracle() {
  static const int adj[8][3] = {{1, 3, 4}, {2, 0, 5}, {3, 1, 6}, {0, 2, 7},
                                {7, 5, 0}, {4, 6, 1}, {5, 7, 2}, {6, 4, 3}};
  std::array<IVec3, 8> c;
  for (int i = 0; i < 8; ++i) c[i] = {i & 1, (i >> 1) & 1, (i >> 2) & 1};
  std::array<int, 8> perm{0, 1, 2, 3, 4, 5, 6, 7};
  uint64_t n = 0;
  do {
    bool ok = true;
    for (int v = 0; v < 8 && ok; ++v) {
      const IVec3& o = c[perm[v]];
      ok = triple(c[perm[adj[v][0]]] - o, c[perm[adj[v][1]]] - o, c[perm[adj[v][2]]] - o) > 0;
    }
    n += ok;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return n / 24;
}

}  // namespace

TEST(Layout, DefaultHas35Nodes) {
  EXPECT_EQ(layout().size(), 35u);
  EXPECT_EQ(layout().scale, 4);
  for (int c = 0; c < 8; ++c) {
    const Vec3& p = layout().positions[layout().corner_ids[c]];
    EXPECT_EQ(p.z, c >= 4 ? 1.0 : 0.0);
  }
}

TEST(Layout, ClosedUnderCubeGroup) {
  std::set<IVec3> pts(layout().ipos.begin(), layout().ipos.end());
  for (const CubeTransform& t : cube_group()) {
    std::set<IVec3> img;
    for (const IVec3& p : layout().ipos) img.insert(t.apply(p, layout().scale));
    EXPECT_EQ(img, pts);
  }
}

TEST(Layout, RoundTripAndValidation) {
  std::stringstream ss;
  write_layout(ss, layout());
  NodeLayout r = read_layout(ss);
  EXPECT_EQ(r.positions, layout().positions);
  EXPECT_EQ(r.hash(), layout().hash());

  NodeLayout missing;
  missing.positions = {{0, 0, 0}, {1, 0, 0}, {0.5, 0.5, 0.5}};
  EXPECT_THROW(missing.finalize(), Error);
  NodeLayout irrational = default_layout();
  irrational.positions.push_back({1.0 / 3.0 + 1e-7, 0.2, 0.1});
  EXPECT_THROW(irrational.finalize(), Error);
}

TEST(Portfolio, TetCountMatchesOracle) {
  Portfolio p = tet_portfolio(layout());
  uint64_t oracle = tet_oracle(layout());
  EXPECT_EQ(p.counts.raw[0], oracle);
  // frozen from the oracle above
  EXPECT_EQ(oracle, 44142u);
}

TEST(Portfolio, CornersOnlyLayout) {
  std::vector<int32_t> keep(layout().corner_ids.begin(), layout().corner_ids.end());
  NodeLayout corners = restrict_layout(layout(), keep);
  Portfolio p = enumerate_portfolio(corners, QualityConfig{});
  // the cube plus twisted relabelings whose corner Jacobians stay positive;
  // only the cube has planar faces and is stored
  EXPECT_EQ(p.counts.raw[static_cast<int>(CellKind::kHex)], corner_hex_oracle());
  EXPECT_EQ(corner_hex_oracle(), 10u);
  EXPECT_EQ(p.counts.raw[0], tet_oracle(corners));
  EXPECT_EQ(tet_oracle(corners), 58u);
  auto hexes = p.of_kind(CellKind::kHex);
  ASSERT_EQ(hexes.size(), 1u);
  EXPECT_DOUBLE_EQ(hexes[0]->sj, 1.0);
}

TEST(Portfolio, FacesOf) {
  const Portfolio& p = test::full_portfolio();
  std::map<CellKind, std::pair<int, int>> expect{{CellKind::kTet, {4, 0}},
                                                 {CellKind::kPyramid, {4, 1}},
                                                 {CellKind::kPrism, {2, 3}},
                                                 {CellKind::kHex, {0, 6}}};
  for (CellKind k : kAllCellKinds) {
    auto elems = p.of_kind(k);
    ASSERT_FALSE(elems.empty());
    auto faces = faces_of(*elems.front());
    int tri = 0, quad = 0;
    for (const auto& f : faces) (f.size() == 3 ? tri : quad)++;
    EXPECT_EQ(std::make_pair(tri, quad), expect[k]) << kind_name(k);
  }
}

TEST(Portfolio, InvariantUnderCubeGroup) {
  const Portfolio& p = test::full_portfolio();
  std::map<std::pair<CellKind, std::vector<int32_t>>, double> sj;
  for (const CandidateElement& e : p.elements) sj[{e.kind, sorted_nodes(e)}] = e.sj;
  for (const CubeTransform& t : cube_group()) {
    std::vector<int32_t> perm = induced_permutation(t, layout());
    size_t missing = 0, changed = 0;
    for (const CandidateElement& e : p.elements) {
      std::vector<int32_t> img;
      for (int i = 0; i < e.size(); ++i) img.push_back(perm[e.nodes[i]]);
      std::sort(img.begin(), img.end());
      auto it = sj.find({e.kind, img});
      if (it == sj.end()) {
        ++missing;
      } else if (t.orientation > 0 && std::abs(it->second - e.sj) > 1e-12) {
        ++changed;
      }
    }
    EXPECT_EQ(missing, 0u) << transform_index(t);
    EXPECT_EQ(changed, 0u) << transform_index(t);
  }
}

TEST(Portfolio, NoDuplicates) {
  const Portfolio& p = test::full_portfolio();
  std::set<Cell> seen;
  for (const CandidateElement& e : p.elements) EXPECT_TRUE(seen.insert(canonical_order(e.cell())).second);
  std::set<std::pair<CellKind, std::vector<int32_t>>> sets;
  for (const CandidateElement& e : p.elements)
    if (e.kind == CellKind::kTet) EXPECT_TRUE(sets.insert({e.kind, sorted_nodes(e)}).second);
}

TEST(Portfolio, OccupancyNonemptyForLargeElements) {
  const Portfolio& p = test::full_portfolio();
  const double cell = 1.0 / 64;
  size_t large = 0;
  for (const CandidateElement& e : p.elements) {
    if (volume(layout(), e) <= cell) continue;
    ++large;
    EXPECT_TRUE(e.occupancy.any());
  }
  EXPECT_GT(large, 0u);
}

TEST(Portfolio, StoredElementsPassTheirFilter) {
  const Portfolio& p = test::full_portfolio();
  QualityConfig q;
  for (const CandidateElement& e : p.elements) {
    EXPECT_GE(e.sj, q.threshold(e.kind));
    EXPECT_TRUE(e.convex);
    std::vector<Vec3> pts;
    for (int i = 0; i < e.size(); ++i) pts.push_back(layout().positions[e.nodes[i]]);
    EXPECT_NEAR(scaled_jacobian(e.kind, pts), e.sj, 1e-12);
  }
}

TEST(Portfolio, CacheRoundTrip) {
  Portfolio p = tet_portfolio(layout());
  std::stringstream ss;
  write_portfolio(ss, p);
  auto r = read_portfolio(ss, layout(), QualityConfig{});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->counts.raw, p.counts.raw);
  ASSERT_EQ(r->elements.size(), p.elements.size());
  for (size_t i = 0; i < p.elements.size(); ++i) EXPECT_EQ(r->elements[i].cell(), p.elements[i].cell());

  // a different quality config invalidates the cache
  std::stringstream again;
  write_portfolio(again, p);
  QualityConfig other;
  other.sj_min_tet = 0.5;
  EXPECT_FALSE(read_portfolio(again, layout(), other).has_value());
}

TEST(Portfolio, CountReportIsDeterministic) {
  Portfolio a = tet_portfolio(layout()), b = tet_portfolio(layout());
  EXPECT_EQ(format_counts(a.counts, a.config), format_counts(b.counts, b.config));
  EXPECT_NE(format_counts(a.counts, a.config).find("44142"), std::string::npos);
}
