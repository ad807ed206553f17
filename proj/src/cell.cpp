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

#include "retrench/cell.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "retrench/error.hpp"

namespace retrench {

namespace {

constexpr LocalFace F3(uint8_t a, uint8_t b, uint8_t c) { return {3, {a, b, c, 0}}; }
constexpr LocalFace F4(uint8_t a, uint8_t b, uint8_t c, uint8_t d) { return {4, {a, b, c, d}}; }

constexpr std::array<LocalFace, 4> kTetFaces = {F3(0, 2, 1), F3(0, 1, 3), F3(1, 2, 3),
                                                F3(2, 0, 3)};
constexpr std::array<LocalFace, 5> kPyramidFaces = {F4(0, 3, 2, 1), F3(0, 1, 4), F3(1, 2, 4),
                                                    F3(2, 3, 4), F3(3, 0, 4)};
constexpr std::array<LocalFace, 5> kPrismFaces = {F3(0, 2, 1), F3(3, 4, 5), F4(0, 1, 4, 3),
                                                  F4(1, 2, 5, 4), F4(2, 0, 3, 5)};
constexpr std::array<LocalFace, 6> kHexFaces = {F4(0, 3, 2, 1), F4(4, 5, 6, 7), F4(0, 1, 5, 4),
                                                F4(1, 2, 6, 5), F4(2, 3, 7, 6), F4(3, 0, 4, 7)};

using E = std::array<uint8_t, 2>;
constexpr std::array<E, 6> kTetEdges = {E{0, 1}, E{1, 2}, E{2, 0}, E{0, 3}, E{1, 3}, E{2, 3}};
constexpr std::array<E, 8> kPyramidEdges = {E{0, 1}, E{1, 2}, E{2, 3}, E{3, 0},
                                            E{0, 4}, E{1, 4}, E{2, 4}, E{3, 4}};
constexpr std::array<E, 9> kPrismEdges = {E{0, 1}, E{1, 2}, E{2, 0}, E{3, 4}, E{4, 5},
                                          E{5, 3}, E{0, 3}, E{1, 4}, E{2, 5}};
constexpr std::array<E, 12> kHexEdges = {E{0, 1}, E{1, 2}, E{2, 3}, E{3, 0}, E{4, 5}, E{5, 6},
                                         E{6, 7}, E{7, 4}, E{0, 4}, E{1, 5}, E{2, 6}, E{3, 7}};

// Each corner lists (origin; a, b, c) with det(pa-po, pb-po, pc-po) > 0 on a
// valid cell. Tets use even permutations of (0 1 2 3).
constexpr std::array<JacobianCorner, 4> kTetCorners = {
    JacobianCorner{0, {1, 2, 3}}, JacobianCorner{1, {2, 0, 3}}, JacobianCorner{2, {0, 1, 3}},
    JacobianCorner{3, {0, 2, 1}}};
constexpr std::array<JacobianCorner, 4> kPyramidCorners = {
    JacobianCorner{0, {1, 3, 4}}, JacobianCorner{1, {2, 0, 4}}, JacobianCorner{2, {3, 1, 4}},
    JacobianCorner{3, {0, 2, 4}}};
constexpr std::array<JacobianCorner, 6> kPrismCorners = {
    JacobianCorner{0, {1, 2, 3}}, JacobianCorner{1, {2, 0, 4}}, JacobianCorner{2, {0, 1, 5}},
    JacobianCorner{3, {5, 4, 0}}, JacobianCorner{4, {3, 5, 1}}, JacobianCorner{5, {4, 3, 2}}};
constexpr std::array<JacobianCorner, 8> kHexCorners = {
    JacobianCorner{0, {1, 3, 4}}, JacobianCorner{1, {2, 0, 5}}, JacobianCorner{2, {3, 1, 6}},
    JacobianCorner{3, {0, 2, 7}}, JacobianCorner{4, {7, 5, 0}}, JacobianCorner{5, {4, 6, 1}},
    JacobianCorner{6, {5, 7, 2}}, JacobianCorner{7, {6, 4, 3}}};

constexpr std::array<uint8_t, 4> kTetFlip = {0, 2, 1, 3};
constexpr std::array<uint8_t, 5> kPyramidFlip = {0, 3, 2, 1, 4};
constexpr std::array<uint8_t, 6> kPrismFlip = {0, 2, 1, 3, 5, 4};
constexpr std::array<uint8_t, 8> kHexFlip = {0, 3, 2, 1, 4, 7, 6, 5};

std::vector<uint8_t> compose(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  // (a after b): position i takes old vertex b[a[i]].
  std::vector<uint8_t> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = b[a[i]];
  return r;
}

std::vector<std::vector<uint8_t>> close_group(std::vector<std::vector<uint8_t>> gens) {
  std::set<std::vector<uint8_t>> seen;
  std::vector<uint8_t> id(gens.front().size());
  for (size_t i = 0; i < id.size(); ++i) id[i] = static_cast<uint8_t>(i);
  std::vector<std::vector<uint8_t>> frontier = {id};
  seen.insert(id);
  while (!frontier.empty()) {
    std::vector<std::vector<uint8_t>> next;
    for (const auto& g : frontier) {
      for (const auto& h : gens) {
        auto c = compose(g, h);
        if (seen.insert(c).second) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

int node_count(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return 4;
    case CellKind::kPyramid: return 5;
    case CellKind::kPrism: return 6;
    case CellKind::kHex: return 8;
  }
  return 0;
}

std::string_view kind_name(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return "tet";
    case CellKind::kPyramid: return "pyramid";
    case CellKind::kPrism: return "prism";
    case CellKind::kHex: return "hex";
  }
  return "?";
}

CellKind parse_kind(std::string_view name) {
  for (CellKind k : kAllCellKinds)
    if (kind_name(k) == name) return k;
  throw Error(ErrorCode::kParseError, "unknown cell kind '" + std::string(name) + "'");
}

int vtk_cell_type(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return 10;
    case CellKind::kPyramid: return 14;
    case CellKind::kPrism: return 13;
    case CellKind::kHex: return 12;
  }
  return 0;
}

std::span<const LocalFace> local_faces(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return kTetFaces;
    case CellKind::kPyramid: return kPyramidFaces;
    case CellKind::kPrism: return kPrismFaces;
    case CellKind::kHex: return kHexFaces;
  }
  return {};
}

std::span<const std::array<uint8_t, 2>> local_edges(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return kTetEdges;
    case CellKind::kPyramid: return kPyramidEdges;
    case CellKind::kPrism: return kPrismEdges;
    case CellKind::kHex: return kHexEdges;
  }
  return {};
}

std::span<const JacobianCorner> jacobian_corners(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return kTetCorners;
    case CellKind::kPyramid: return kPyramidCorners;
    case CellKind::kPrism: return kPrismCorners;
    case CellKind::kHex: return kHexCorners;
  }
  return {};
}

std::span<const uint8_t> orientation_flip(CellKind kind) {
  switch (kind) {
    case CellKind::kTet: return kTetFlip;
    case CellKind::kPyramid: return kPyramidFlip;
    case CellKind::kPrism: return kPrismFlip;
    case CellKind::kHex: return kHexFlip;
  }
  return {};
}

const std::vector<std::vector<uint8_t>>& rotation_symmetries(CellKind kind) {
  static const std::array<std::vector<std::vector<uint8_t>>, 4> groups = {
      close_group({{1, 2, 0, 3}, {1, 0, 3, 2}}),
      close_group({{1, 2, 3, 0, 4}}),
      close_group({{1, 2, 0, 4, 5, 3}, {3, 5, 4, 0, 2, 1}}),
      // quarter turns about the vertical and the x axis
      close_group({{1, 2, 3, 0, 5, 6, 7, 4}, {4, 5, 1, 0, 7, 6, 2, 3}}),
  };
  return groups[static_cast<int>(kind)];
}

Cell canonical_order(const Cell& cell) {
  Cell best = cell;
  for (const auto& p : rotation_symmetries(cell.kind)) {
    Cell c{cell.kind, std::vector<int32_t>(cell.nodes.size())};
    for (size_t i = 0; i < p.size(); ++i) c.nodes[i] = cell.nodes[p[i]];
    if (c.nodes < best.nodes) best = std::move(c);
  }
  return best;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonManifoldFace: return "NonManifoldFace";
    case ErrorCode::kDegenerateElement: return "DegenerateElement";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kNonDistinguishable: return "NonDistinguishable";
    case ErrorCode::kNonConformalAssembly: return "NonConformalAssembly";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kInvalidDims: return "InvalidDims";
    case ErrorCode::kNonWatertight: return "NonWatertight";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnmappedFace: return "UnmappedFace";
    case ErrorCode::kNoSuchCurve: return "NoSuchCurve";
    case ErrorCode::kNoSuchCorner: return "NoSuchCorner";
  }
  return "Error";
}

}  // namespace retrench
