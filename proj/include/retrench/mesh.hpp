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
#include <unordered_map>
#include <vector>

#include "retrench/cell.hpp"
#include "retrench/vec.hpp"

namespace retrench {

/// Unstructured volume mesh of tets, pyramids, prisms and hexes.
struct Mesh {
  std::vector<Vec3> nodes;
  std::vector<Cell> cells;

  Box3 bounds() const;
  /// Default geometric tolerance: 1e-9 times the bounding-box diagonal.
  double eps_geom() const;
  /// Throws InvalidInput when a cell has the wrong node count, repeats a node
  /// or references a missing node.
  void check_references() const;
};

/// Sorted node ids of a face; unused slots hold -1.
struct FaceKey {
  std::array<int32_t, 4> ids{-1, -1, -1, -1};

  static FaceKey from(const int32_t* nodes, int n);
  int size() const { return ids[3] < 0 ? 3 : 4; }
  bool operator==(const FaceKey&) const = default;
  auto operator<=>(const FaceKey&) const = default;
};

struct FaceKeyHash {
  size_t operator()(const FaceKey& k) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (int32_t v : k.ids) h = (h ^ static_cast<uint32_t>(v)) * 1099511628211ull;
    return static_cast<size_t>(h);
  }
};

struct FaceUse {
  int32_t cell;
  uint8_t local_face;
};

struct FaceRecord {
  FaceKey key;
  /// Node ids in the orientation of the first owner (outward from it).
  std::vector<int32_t> nodes;
  std::vector<FaceUse> owners;

  bool boundary() const { return owners.size() == 1; }
};

struct FaceTable {
  std::vector<FaceRecord> faces;
  std::unordered_map<FaceKey, int32_t, FaceKeyHash> index;
  /// Indices of faces with three or more owners.
  std::vector<int32_t> non_manifold;

  size_t boundary_count() const;
  size_t interior_count() const;
};

/// Builds the face table keyed by sorted node sets. Throws NonManifoldFace
/// when a face has more than two owners unless `collect_non_manifold` is set,
/// in which case such faces are listed in `non_manifold`.
FaceTable build_face_table(const Mesh& mesh, bool collect_non_manifold = false);

struct HangingNode {
  int32_t node;
  int32_t face;  // index into the face table
};

struct HangingEdge {
  std::array<int32_t, 2> edge;
  int32_t face;
};

struct ConformityReport {
  std::vector<int32_t> non_manifold_faces;
  std::vector<HangingNode> hanging_nodes;
  std::vector<HangingEdge> hanging_edges;
  /// Components of the dual graph whose edges are shared faces.
  int face_components = 0;
  /// Components when cells sharing any node are connected.
  int node_components = 0;

  /// True when no non-manifold face, hanging node or hanging edge was found.
  /// Disconnected components are reported but do not break conformity.
  bool conforming() const {
    return non_manifold_faces.empty() && hanging_nodes.empty() && hanging_edges.empty();
  }
  std::string summary() const;
};

/// Checks conformity. Nodes are tested only against faces whose bounding box
/// shares a spatial-hash bucket with them. `eps` <= 0 selects mesh.eps_geom().
ConformityReport validate_conformity(const Mesh& mesh, double eps = 0.0);

struct ValenceStats {
  std::vector<int> valence;
  int max = 0;
};

/// Number of distinct mesh edges incident to each node.
ValenceStats node_valences(const Mesh& mesh);

/// Unique undirected edges of the mesh, sorted.
std::vector<std::array<int32_t, 2>> mesh_edges(const Mesh& mesh);

/// Node ids lying on at least one boundary face.
std::vector<int32_t> boundary_nodes(const Mesh& mesh, const FaceTable& table);

}  // namespace retrench
