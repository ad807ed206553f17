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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "retrench/cell.hpp"
#include "retrench/lattice.hpp"
#include "retrench/vec.hpp"

namespace retrench {

/// Bit i set = unit-cube corner i retained.
using NodeMask = uint8_t;

/// A symmetry of the unit cube: x'_i = sign_i > 0 ? x_axis[i] : 1 - x_axis[i].
struct CubeTransform {
  std::array<uint8_t, 3> axis{0, 1, 2};
  std::array<int8_t, 3> sign{1, 1, 1};
  /// corner[i] = image of corner i.
  std::array<uint8_t, 8> corner{};
  /// +1 rotation, -1 reflection.
  int orientation = 1;

  Vec3 apply(const Vec3& p) const;
  /// On integer coordinates of a cube with side `scale`.
  IVec3 apply(const IVec3& p, int64_t scale) const;
  NodeMask apply(NodeMask mask) const;

  bool operator==(const CubeTransform& o) const { return axis == o.axis && sign == o.sign; }
};

/// All 48 transforms; index 0 is the identity, the order is fixed.
const std::vector<CubeTransform>& cube_group();
/// The 24 rotations, in cube_group() order.
const std::vector<CubeTransform>& rotation_group();
/// Index of a transform in cube_group().
int transform_index(const CubeTransform& t);
/// a after b.
CubeTransform compose(const CubeTransform& a, const CubeTransform& b);
CubeTransform inverse(const CubeTransform& t);

/// Lattice permutation induced by t; throws InvalidInput if the layout is
/// not mapped onto itself.
std::vector<int32_t> induced_permutation(const CubeTransform& t, const NodeLayout& layout);

/// Maps cells through a lattice permutation; reflections re-order vertices so
/// orientation stays positive.
std::vector<Cell> transform_cells(const std::vector<Cell>& cells, const std::vector<int32_t>& perm,
                                  int orientation);

struct CanonicalCase {
  /// 0 is the empty case; ids are ordered by representative mask.
  int case_id = 0;
  NodeMask representative = 0;
  int orbit_size = 1;
};

/// Cases are orbits under rotations: mirror images of a chiral corner set
/// are separate cases. Returns the case (representative = minimum mask of
/// the orbit) and a rotation carrying the representative onto `mask`.
std::pair<CanonicalCase, CubeTransform> canonicalize(NodeMask mask);

/// The 23 orbits of the 256 masks, by case id.
const std::vector<CanonicalCase>& orbit_census();

/// Masks in the orbit of a case, ascending.
std::vector<NodeMask> orbit_of(const CanonicalCase& c);

/// Rotations fixing a mask.
std::vector<CubeTransform> stabilizer(NodeMask mask);

std::string mask_string(NodeMask mask);

}  // namespace retrench
