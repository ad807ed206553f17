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

#include "retrench/symmetry.hpp"
#include "support.hpp"

using namespace retrench;
using retrench::test::layout;

namespace {

const CubeTransform& identity() {
  static const CubeTransform e = [] {
    for (const CubeTransform& t : cube_group())
      if (t.axis == std::array<uint8_t, 3>{0, 1, 2} && t.sign == std::array<int8_t, 3>{1, 1, 1}) return t;
    return CubeTransform{};
  }();
  return e;
}

Mesh template_mesh(const SubdivisionTemplate& t) {
  Mesh m;
  m.nodes = layout().positions;
  m.cells = t.cells;
  return m;
}

double min_sj(const SubdivisionTemplate& t) {
  double lo = 1;
  for (const Cell& c : t.cells) lo = std::min(lo, scaled_jacobian(c, layout().positions));
  return lo;
}

}  // namespace

TEST(CubeGroup, Sizes) {
  EXPECT_EQ(cube_group().size(), 48u);
  EXPECT_EQ(rotation_group().size(), 24u);
  for (const CubeTransform& r : rotation_group()) EXPECT_EQ(r.orientation, 1);
  int reflections = 0;
  for (const CubeTransform& t : cube_group()) reflections += t.orientation < 0;
  EXPECT_EQ(reflections, 24);
}

TEST(CubeGroup, Axioms) {
  const auto& g = cube_group();
  for (size_t i = 0; i < g.size(); ++i) EXPECT_EQ(transform_index(g[i]), static_cast<int>(i));
  for (const CubeTransform& a : g) {
    EXPECT_EQ(compose(identity(), a), a);
    EXPECT_EQ(compose(a, identity()), a);
    EXPECT_EQ(compose(a, inverse(a)), identity());
    EXPECT_EQ(compose(inverse(a), a), identity());
    for (const CubeTransform& b : g) {
      CubeTransform ab = compose(a, b);
      ASSERT_GE(transform_index(ab), 0);
      EXPECT_EQ(ab.orientation, a.orientation * b.orientation);
      for (const CubeTransform& c : g) ASSERT_EQ(compose(ab, c), compose(a, compose(b, c)));
    }
  }
}

TEST(CubeGroup, ComposeIsAfter) {
  const IVec3 p{1, 2, 3};
  for (const CubeTransform& a : cube_group())
    for (const CubeTransform& b : cube_group()) {
      EXPECT_EQ(compose(a, b).apply(p, 4), a.apply(b.apply(p, 4), 4));
      for (int m : {0x01, 0x13, 0xA5}) {
        NodeMask mask = static_cast<NodeMask>(m);
        EXPECT_EQ(compose(a, b).apply(mask), a.apply(b.apply(mask)));
      }
    }
}

TEST(CubeGroup, CornerMapMatchesPointMap) {
  const NodeLayout& l = layout();
  for (const CubeTransform& t : cube_group())
    for (int c = 0; c < 8; ++c) EXPECT_EQ(t.apply(l.ipos[l.corner_ids[c]], l.scale), l.ipos[l.corner_ids[t.corner[c]]]);
}

TEST(Census, Counts) {
  const auto& census = orbit_census();
  ASSERT_EQ(census.size(), 23u);
  int total = 0;
  for (size_t i = 0; i < census.size(); ++i) {
    EXPECT_EQ(census[i].case_id, static_cast<int>(i));
    EXPECT_EQ(static_cast<int>(orbit_of(census[i]).size()), census[i].orbit_size);
    EXPECT_EQ(census[i].orbit_size * static_cast<int>(stabilizer(census[i].representative).size()), 24);
    total += census[i].orbit_size;
  }
  EXPECT_EQ(total, 256);
  EXPECT_EQ(census.front().representative, 0);
  EXPECT_EQ(census.back().representative, 0xFF);
  EXPECT_EQ(census.back().orbit_size, 1);
}

TEST(Canonicalize, Examples) {
  EXPECT_EQ(canonicalize(0).first.case_id, 0);
  auto full = canonicalize(0xFF);
  EXPECT_EQ(full.first.orbit_size, 1);
  EXPECT_EQ(full.first.case_id, 22);
  std::set<int> single;
  for (int b = 0; b < 8; ++b) {
    auto c = canonicalize(static_cast<NodeMask>(1 << b));
    EXPECT_EQ(c.first.orbit_size, 8);
    single.insert(c.first.case_id);
  }
  EXPECT_EQ(single.size(), 1u);
}

TEST(Canonicalize, TransformCarriesRepresentative) {
  for (int m = 0; m < 256; ++m) {
    auto [c, t] = canonicalize(static_cast<NodeMask>(m));
    EXPECT_EQ(t.orientation, 1);
    EXPECT_EQ(t.apply(c.representative), m);
    EXPECT_LE(c.representative, m);
  }
}

TEST(Canonicalize, RotationInvarianceExhaustive) {
  for (int m = 0; m < 256; ++m) {
    int id = canonicalize(static_cast<NodeMask>(m)).first.case_id;
    for (const CubeTransform& r : rotation_group()) EXPECT_EQ(canonicalize(r.apply(static_cast<NodeMask>(m))).first.case_id, id);
  }
}

// Cases are rotation orbits; reflections act on them as a well-defined
// involution that swaps exactly one chiral pair.
TEST(Canonicalize, ReflectionsActOnCases) {
  std::map<int, int> image;
  int unstable = 0;
  for (int m = 0; m < 256; ++m) {
    int id = canonicalize(static_cast<NodeMask>(m)).first.case_id;
    for (const CubeTransform& t : cube_group()) {
      int to = canonicalize(t.apply(static_cast<NodeMask>(m))).first.case_id;
      if (t.orientation < 0) {
        auto [it, fresh] = image.emplace(id, to);
        EXPECT_EQ(it->second, to);
      }
      unstable += to != id;
    }
  }
  int moved = 0;
  for (auto [from, to] : image) {
    EXPECT_EQ(image[to], from);
    moved += from != to;
  }
  EXPECT_EQ(moved, 2);
  EXPECT_GT(unstable, 0);
}

TEST(ApplyTransform, IdentityAndInverse) {
  for (const LibraryEntry& e : test::shipped_library().entries) {
    SubdivisionTemplate same = apply_transform(e.tmpl, identity(), layout());
    EXPECT_EQ(same.cells, e.tmpl.cells);
    EXPECT_EQ(same.mask, e.tmpl.mask);
    for (const CubeTransform& t : cube_group()) {
      SubdivisionTemplate back = apply_transform(apply_transform(e.tmpl, t, layout()), inverse(t), layout());
      std::vector<Cell> a, b;
      for (const Cell& c : back.cells) a.push_back(canonical_order(c));
      for (const Cell& c : e.tmpl.cells) b.push_back(canonical_order(c));
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b);
    }
  }
}

TEST(ApplyTransform, PreservesQualityAndConformity) {
  FacePatternTable patterns(layout(), PatternStyle::kFull);
  for (const LibraryEntry& e : test::shipped_library().entries) {
    double ref = min_sj(e.tmpl);
    for (const CubeTransform& t : cube_group()) {
      SubdivisionTemplate img = apply_transform(e.tmpl, t, layout());
      EXPECT_EQ(img.mask, t.apply(e.tmpl.mask));
      EXPECT_NEAR(min_sj(img), ref, 1e-12);
      EXPECT_TRUE(validate_conformity(template_mesh(img)).conforming());
      for (const Cell& c : img.cells) EXPECT_GT(scaled_jacobian(c, layout().positions), 0);
      if (t.orientation > 0) EXPECT_TRUE(verify_template(img, layout(), patterns).ok()) << e.canonical.case_id;
    }
  }
}

TEST(InducedPermutation, IsAPermutation) {
  for (const CubeTransform& t : cube_group()) {
    std::vector<int32_t> p = induced_permutation(t, layout());
    ASSERT_EQ(p.size(), layout().size());
    std::vector<int32_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], static_cast<int32_t>(i));
    for (int c = 0; c < 8; ++c) EXPECT_EQ(p[layout().corner_ids[c]], layout().corner_ids[t.corner[c]]);
  }
}

TEST(MaskString, BitOrder) {
  EXPECT_EQ(mask_string(0x01), "10000000");
  EXPECT_EQ(mask_string(0xFF), "11111111");
}
