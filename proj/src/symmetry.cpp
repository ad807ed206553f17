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

#include "retrench/symmetry.hpp"

#include <algorithm>
#include <map>

#include "retrench/error.hpp"

namespace retrench {

namespace {

constexpr IVec3 kCorner[8] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                              {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

int corner_index(const IVec3& p) {
  for (int i = 0; i < 8; ++i)
    if (kCorner[i] == p) return i;
  return -1;
}

std::vector<CubeTransform> build_group() {
  std::vector<CubeTransform> out;
  std::array<uint8_t, 3> axis{0, 1, 2};
  do {
    for (int s = 0; s < 8; ++s) {
      CubeTransform t;
      t.axis = axis;
      for (int i = 0; i < 3; ++i) t.sign[i] = (s >> i) & 1 ? -1 : 1;
      int parity = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) parity ^= axis[i] > axis[j];
      t.orientation = (parity ? -1 : 1) * t.sign[0] * t.sign[1] * t.sign[2];
      for (int c = 0; c < 8; ++c) t.corner[c] = static_cast<uint8_t>(corner_index(t.apply(kCorner[c], 1)));
      out.push_back(t);
    }
  } while (std::next_permutation(axis.begin(), axis.end()));
  return out;
}

struct CaseTables {
  std::vector<CanonicalCase> cases;
  std::array<int, 256> case_of{};
  // transform index carrying the representative to the mask
  std::array<int, 256> carrier{};
};

const CaseTables& case_tables() {
  static const CaseTables tables = [] {
    CaseTables t;
    const auto& group = rotation_group();
    std::map<NodeMask, std::vector<NodeMask>> orbits;
    for (int m = 0; m < 256; ++m) {
      NodeMask rep = static_cast<NodeMask>(m);
      for (const auto& g : group) rep = std::min(rep, g.apply(static_cast<NodeMask>(m)));
      orbits[rep].push_back(static_cast<NodeMask>(m));
    }
    for (const auto& [rep, members] : orbits) {
      CanonicalCase c{static_cast<int>(t.cases.size()), rep, static_cast<int>(members.size())};
      for (NodeMask m : members) {
        t.case_of[m] = c.case_id;
        for (size_t g = 0; g < group.size(); ++g)
          if (group[g].apply(rep) == m) {
            t.carrier[m] = static_cast<int>(g);
            break;
          }
      }
      t.cases.push_back(c);
    }
    return t;
  }();
  return tables;
}

}  // namespace

Vec3 CubeTransform::apply(const Vec3& p) const {
  Vec3 q;
  for (int i = 0; i < 3; ++i) q[i] = sign[i] > 0 ? p[axis[i]] : 1.0 - p[axis[i]];
  return q;
}

IVec3 CubeTransform::apply(const IVec3& p, int64_t scale) const {
  int64_t q[3];
  for (int i = 0; i < 3; ++i) q[i] = sign[i] > 0 ? p[axis[i]] : scale - p[axis[i]];
  return {q[0], q[1], q[2]};
}

NodeMask CubeTransform::apply(NodeMask mask) const {
  unsigned out = 0;
  for (int c = 0; c < 8; ++c)
    if (mask & (1u << c)) out |= 1u << corner[c];
  return static_cast<NodeMask>(out);
}

const std::vector<CubeTransform>& cube_group() {
  static const std::vector<CubeTransform> group = build_group();
  return group;
}

const std::vector<CubeTransform>& rotation_group() {
  static const std::vector<CubeTransform> group = [] {
    std::vector<CubeTransform> out;
    for (const auto& g : cube_group())
      if (g.orientation > 0) out.push_back(g);
    return out;
  }();
  return group;
}

int transform_index(const CubeTransform& t) {
  const auto& g = cube_group();
  for (size_t i = 0; i < g.size(); ++i)
    if (g[i] == t) return static_cast<int>(i);
  return -1;
}

CubeTransform compose(const CubeTransform& a, const CubeTransform& b) {
  // Identify the composite by its action on three independent points.
  IVec3 probe[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  IVec3 origin = a.apply(b.apply(IVec3{0, 0, 0}, 1), 1);
  IVec3 img[3];
  for (int i = 0; i < 3; ++i) img[i] = a.apply(b.apply(probe[i], 1), 1);
  for (const auto& g : cube_group()) {
    bool same = g.apply(IVec3{0, 0, 0}, 1) == origin;
    for (int i = 0; i < 3 && same; ++i) same = g.apply(probe[i], 1) == img[i];
    if (same) return g;
  }
  throw Error(ErrorCode::kInvalidInput, "cube group is not closed");
}

CubeTransform inverse(const CubeTransform& t) {
  for (const auto& g : cube_group())
    if (compose(g, t) == cube_group()[0]) return g;
  throw Error(ErrorCode::kInvalidInput, "transform has no inverse");
}

std::vector<int32_t> induced_permutation(const CubeTransform& t, const NodeLayout& layout) {
  std::vector<int32_t> perm(layout.size());
  for (size_t i = 0; i < layout.size(); ++i) {
    perm[i] = layout.find(t.apply(layout.ipos[i], layout.scale));
    if (perm[i] < 0) throw Error(ErrorCode::kInvalidInput, "layout is not symmetric under the cube group");
  }
  return perm;
}

std::vector<Cell> transform_cells(const std::vector<Cell>& cells, const std::vector<int32_t>& perm,
                                  int orientation) {
  std::vector<Cell> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) {
    Cell m{c.kind, std::vector<int32_t>(c.nodes.size())};
    for (size_t i = 0; i < c.nodes.size(); ++i) m.nodes[i] = perm.at(c.nodes[i]);
    if (orientation < 0) {
      auto flip = orientation_flip(c.kind);
      Cell f{c.kind, std::vector<int32_t>(m.nodes.size())};
      for (size_t i = 0; i < m.nodes.size(); ++i) f.nodes[i] = m.nodes[flip[i]];
      m = std::move(f);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::pair<CanonicalCase, CubeTransform> canonicalize(NodeMask mask) {
  const auto& t = case_tables();
  return {t.cases[t.case_of[mask]], rotation_group()[t.carrier[mask]]};
}

const std::vector<CanonicalCase>& orbit_census() { return case_tables().cases; }

std::vector<NodeMask> orbit_of(const CanonicalCase& c) {
  std::vector<NodeMask> out;
  const auto& t = case_tables();
  for (int m = 0; m < 256; ++m)
    if (t.case_of[m] == c.case_id) out.push_back(static_cast<NodeMask>(m));
  return out;
}

std::vector<CubeTransform> stabilizer(NodeMask mask) {
  std::vector<CubeTransform> out;
  for (const auto& g : rotation_group())
    if (g.apply(mask) == mask) out.push_back(g);
  return out;
}

std::string mask_string(NodeMask mask) {
  std::string s(8, '0');
  for (int c = 0; c < 8; ++c)
    if (mask & (1u << c)) s[c] = '1';
  return s;
}

}  // namespace retrench
