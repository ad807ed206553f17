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
#include <bit>

#include "retrench/error.hpp"
#include "retrench/subdivision.hpp"

namespace retrench {

namespace {

constexpr IVec3 kUnit[8] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                            {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Face-local grid points (a, b) in {0, 1, 2}^2; corners k = 0..3 run around
// the face in its outward order.
struct Grid {
  int a, b;
};
constexpr Grid kCornerGrid[4] = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};

Grid corner(int k) { return kCornerGrid[k & 3]; }
Grid mid(int k, int l) {
  Grid p = corner(k), q = corner(l);
  return {(p.a + q.a) / 2, (p.b + q.b) / 2};
}
constexpr Grid kCenter{1, 1};

using Poly = std::vector<Grid>;

struct LocalPattern {
  std::vector<Poly> polygons;
  std::vector<std::array<Grid, 2>> lone_edges;
};

LocalPattern full_pattern(unsigned bits) {
  LocalPattern p;
  int n = std::popcount(bits);
  auto has = [&](int k) { return (bits >> (k & 3)) & 1u; };
  auto quadrant = [&](int k) { return Poly{corner(k), mid(k, k + 1), kCenter, mid(k + 3, k)}; };
  auto notch = [&](int m) { return Poly{mid(m + 3, m), mid(m, m + 1), kCenter}; };
  if (n == 1) {
    for (int k = 0; k < 4; ++k)
      if (has(k)) p.polygons.push_back({corner(k), mid(k, k + 1), mid(k + 3, k)});
  } else if (n >= 2) {
    bool diagonal = n == 2 && has(0) == has(2);
    for (int k = 0; k < 4; ++k) {
      if (has(k))
        p.polygons.push_back(quadrant(k));
      else if (n == 3 || diagonal)
        p.polygons.push_back(notch(k));
    }
  }
  return p;
}

LocalPattern reduced_pattern(unsigned bits) {
  LocalPattern p;
  int n = std::popcount(bits);
  auto has = [&](int k) { return (bits >> (k & 3)) & 1u; };
  for (int k = 0; k < 4; ++k) {
    if (n == 4) p.polygons.push_back({corner(k), corner(k + 1), kCenter});
    if (n == 3 && has(k) && has(k + 1)) p.polygons.push_back({corner(k), corner(k + 1), kCenter});
    if (n == 2 && has(k) && has(k + 1)) p.polygons.push_back({corner(k), corner(k + 1), kCenter});
  }
  if (n == 2 && has(0) == has(2)) {
    int k = has(0) ? 0 : 1;
    p.lone_edges.push_back({corner(k), corner(k + 2)});
  }
  return p;
}

}  // namespace

FacePatternTable::FacePatternTable(const NodeLayout& layout, PatternStyle style) : style_(style) {
  if (layout.scale % 2 != 0)
    throw Error(ErrorCode::kInvalidInput, "face patterns need face centers and edge midpoints on the lattice");
  auto faces = local_faces(CellKind::kHex);
  for (int f = 0; f < 6; ++f) {
    IVec3 c0 = kUnit[faces[f].v[0]], c1 = kUnit[faces[f].v[1]], c3 = kUnit[faces[f].v[3]];
    auto id = [&](Grid g) {
      IVec3 p2 = c0 * 2 + (c1 - c0) * g.a + (c3 - c0) * g.b;
      int32_t i = layout.find(p2 * (layout.scale / 2));
      if (i < 0) throw Error(ErrorCode::kInvalidInput, "face pattern node missing from the layout");
      return i;
    };
    for (unsigned bits = 0; bits < 16; ++bits) {
      LocalPattern lp = style == PatternStyle::kFull ? full_pattern(bits) : reduced_pattern(bits);
      FacePattern& fp = table_[f][bits];
      auto add_edge = [&](int32_t a, int32_t b) {
        std::array<int32_t, 2> e{std::min(a, b), std::max(a, b)};
        if (std::find(fp.edges.begin(), fp.edges.end(), e) == fp.edges.end()) fp.edges.push_back(e);
      };
      for (const Poly& poly : lp.polygons) {
        std::vector<int32_t> ids;
        for (Grid g : poly) ids.push_back(id(g));
        for (size_t i = 0; i < ids.size(); ++i) add_edge(ids[i], ids[(i + 1) % ids.size()]);
        fp.nodes.insert(fp.nodes.end(), ids.begin(), ids.end());
        fp.polygons.push_back(std::move(ids));
      }
      for (const auto& e : lp.lone_edges) {
        add_edge(id(e[0]), id(e[1]));
        fp.nodes.push_back(id(e[0]));
        fp.nodes.push_back(id(e[1]));
      }
      for (int k = 0; k < 4; ++k)
        if ((bits >> k) & 1u) {
          fp.required.push_back(layout.corner_ids[faces[f].v[k]]);
          fp.nodes.push_back(layout.corner_ids[faces[f].v[k]]);
        }
      std::sort(fp.nodes.begin(), fp.nodes.end());
      fp.nodes.erase(std::unique(fp.nodes.begin(), fp.nodes.end()), fp.nodes.end());
      std::sort(fp.edges.begin(), fp.edges.end());
    }
  }
}

const FacePattern& FacePatternTable::for_mask(int face, NodeMask mask) const {
  const LocalFace& lf = local_faces(CellKind::kHex)[face];
  unsigned bits = 0;
  for (int k = 0; k < 4; ++k)
    if ((mask >> lf.v[k]) & 1u) bits |= 1u << k;
  return table_[face][bits];
}

}  // namespace retrench
