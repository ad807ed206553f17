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
#include <span>
#include <string_view>
#include <vector>

namespace retrench {

enum class CellKind : uint8_t { kTet = 0, kPyramid = 1, kPrism = 2, kHex = 3 };

inline constexpr std::array<CellKind, 4> kAllCellKinds = {CellKind::kTet, CellKind::kPyramid,
                                                         CellKind::kPrism, CellKind::kHex};

int node_count(CellKind kind);
std::string_view kind_name(CellKind kind);
/// Parses "tet", "pyramid", "prism" or "hex".
CellKind parse_kind(std::string_view name);
/// VTK legacy cell type id (tet=10, pyramid=14, wedge=13, hex=12).
int vtk_cell_type(CellKind kind);

/// Local face of a cell: up to four local vertex indices, ordered so that the
/// right-hand normal points out of a positively oriented cell.
struct LocalFace {
  uint8_t size = 0;
  std::array<uint8_t, 4> v{};
};

/// Corner used by the Jacobian evaluation: the three edge targets of a vertex,
/// ordered so the determinant is positive on a valid cell.
struct JacobianCorner {
  uint8_t origin;
  std::array<uint8_t, 3> to;
};

// Vertex numbering (unstructured-mesh convention):
//   tet     0 1 2 base, 3 apex; (p1-p0) x (p2-p0) points toward the apex
//   pyramid 0 1 2 3 base, 4 apex; (p1-p0) x (p3-p0) points toward the apex
//   prism   0 1 2 bottom, 3 4 5 top (3 above 0); (p1-p0) x (p2-p0) points up
//   hex     0 1 2 3 bottom, 4 5 6 7 top (4 above 0)
std::span<const LocalFace> local_faces(CellKind kind);
std::span<const std::array<uint8_t, 2>> local_edges(CellKind kind);
std::span<const JacobianCorner> jacobian_corners(CellKind kind);

/// Vertex permutation that restores positive orientation after a reflection.
std::span<const uint8_t> orientation_flip(CellKind kind);

/// All orientation-preserving relabelings of the reference cell (including
/// the identity). Entry `p` maps new position i to old position p[i].
const std::vector<std::vector<uint8_t>>& rotation_symmetries(CellKind kind);

struct Cell {
  CellKind kind = CellKind::kHex;
  std::vector<int32_t> nodes;

  Cell() = default;
  Cell(CellKind k, std::vector<int32_t> n) : kind(k), nodes(std::move(n)) {}

  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

/// Returns `cell` relabeled to the lexicographically least vertex order among
/// its orientation-preserving symmetries.
Cell canonical_order(const Cell& cell);

}  // namespace retrench
