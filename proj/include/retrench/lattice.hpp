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
#include <bitset>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "retrench/cell.hpp"
#include "retrench/quality.hpp"
#include "retrench/vec.hpp"

namespace retrench {

/// 125 integration points of the closed 5x5x5 grid over the unit cube.
using Occupancy = std::bitset<125>;

/// Candidate node positions inside the unit cube.
struct NodeLayout {
  std::vector<Vec3> positions;
  /// Lattice id of unit-cube corner i, corners numbered like hex vertices.
  std::array<int32_t, 8> corner_ids{};
  /// positions * scale, exactly integral.
  std::vector<IVec3> ipos;
  int64_t scale = 1;

  size_t size() const { return positions.size(); }
  /// Lattice id at an exact integer position, or -1.
  int32_t find(const IVec3& p) const;
  /// FNV-1a hash of the integer positions; keys caches and libraries.
  uint64_t hash() const;

  /// Builds ipos/scale/corner_ids from positions. Throws InvalidInput if a
  /// corner is missing, points repeat, or no scale up to 64 makes all
  /// coordinates integral.
  void finalize();
};

/// Corners, edge midpoints, face centers, body center, and the eight octant
/// centers at {1/4, 3/4}^3: 35 nodes. Ids 0-7 are the corners.
NodeLayout default_layout();

/// Sub-layout keeping only the listed ids (renumbered in the given order).
NodeLayout restrict_layout(const NodeLayout& layout, const std::vector<int32_t>& keep);

/// Plain text: one node per line "id x y z"; '#' starts a comment.
NodeLayout read_layout(std::istream& is);
NodeLayout read_layout_file(const std::string& path);
void write_layout(std::ostream& os, const NodeLayout& layout);

struct CandidateElement {
  CellKind kind = CellKind::kTet;
  std::array<int8_t, 8> nodes{-1, -1, -1, -1, -1, -1, -1, -1};
  double sj = 0;
  /// Every quad face is planar and every face plane leaves the other
  /// vertices strictly inside: the element is a convex polytope.
  bool convex = false;
  Occupancy occupancy;

  int size() const { return node_count(kind); }
  Cell cell() const;
};

/// Faces with outward orientation in the element's canonical vertex order.
std::vector<std::vector<int32_t>> faces_of(const CandidateElement& elem);

struct KindCounts {
  std::array<uint64_t, 4> raw{};
  std::array<uint64_t, 4> filtered{};
};

struct Portfolio {
  /// Elements with SJ at or above the kind threshold, sorted by (kind, nodes).
  /// Only convex ones unless EnumerationOptions::keep_nonconvex.
  std::vector<CandidateElement> elements;
  KindCounts counts;
  uint64_t layout_hash = 0;
  QualityConfig config;

  std::vector<const CandidateElement*> of_kind(CellKind kind) const;
};

struct EnumerationOptions {
  /// Kinds to enumerate; raw counts of skipped kinds stay zero.
  std::array<bool, 4> kinds{true, true, true, true};
  int threads = 1;
  /// Warped hexes and prisms pass the SJ filter in the millions; the solver
  /// cannot use them, so by default they are counted but not stored.
  bool keep_nonconvex = false;
};

/// Enumerates every tet, pyramid, prism and hex over lattice nodes with SJ > 0
/// (one canonical vertex order per geometric element) and keeps those meeting
/// the per-kind thresholds.
Portfolio enumerate_portfolio(const NodeLayout& layout, const QualityConfig& cfg,
                              const EnumerationOptions& opts = {});

/// Closed-point occupancy of an element over the 5x5x5 grid.
Occupancy element_occupancy(const NodeLayout& layout, CellKind kind, const int32_t* nodes);

/// The 2x4 count table (raw and filtered per kind) as printed by the CLI.
std::string format_counts(const KindCounts& counts, const QualityConfig& cfg);

void write_portfolio(std::ostream& os, const Portfolio& p);
/// Returns nullopt when the cache header does not match layout and config.
std::optional<Portfolio> read_portfolio(std::istream& is, const NodeLayout& layout,
                                        const QualityConfig& cfg);

}  // namespace retrench
