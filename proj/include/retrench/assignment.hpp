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
#include <vector>

#include "retrench/geometry.hpp"
#include "retrench/lattice.hpp"
#include "retrench/precursor.hpp"
#include "retrench/subdivision.hpp"

namespace retrench {

/// One flag per precursor node; 1 keeps the node.
using PresenceVector = std::vector<uint8_t>;

/// Occupancy of every Super Element, indexed by corner mask.
using OccupancyTable = std::array<Occupancy, 256>;

/// Integration point i = x + 5y + 25z sits at (x, y, z) / 4 in the unit cube.
Vec3 integration_point(int i);

/// Throws NonDistinguishable if two masks share an occupancy, Infeasible if
/// a mask has no solved template.
OccupancyTable occupancy_masks(const TemplateLibrary& library, const NodeLayout& layout);

struct ResidualScore {
  int r_s = 0;  // inside the Super Element, outside the geometry
  int r_p = 0;  // inside the geometry, outside the Super Element
  int64_t r = 0;
};

ResidualScore residual(const Occupancy& se, const Occupancy& geo);

/// Trilinear image of a unit-cube point in a hex cell.
Vec3 trilinear(const Mesh& mesh, const Cell& hex, const Vec3& u);

/// Inside-geometry mask of every precursor cell. Points shared between cells
/// are evaluated once.
std::vector<Occupancy> geometry_masks(const PrecursorMesh& precursor, const GeometryModel& model, int threads = 1);

/// costs[cell][mask] = residual(occupancy[mask], geo[cell]).r
using ResidualTable = std::vector<std::array<int64_t, 256>>;
ResidualTable residual_table(const std::vector<Occupancy>& geo, const OccupancyTable& occupancy);

/// Corner mask of a cell under a presence vector (bit c = hex vertex c).
uint8_t cell_mask(const Cell& hex, const PresenceVector& presence);

int64_t assignment_objective(const Mesh& precursor, const ResidualTable& costs, const PresenceVector& presence);

struct AssignmentOptions {
  size_t exact_cap = 64;
  double budget_seconds = 60;
};

struct AssignmentResult {
  PresenceVector presence;
  int64_t objective = 0;
  bool optimal = false;
  uint64_t search_nodes = 0;
  double seconds = 0;
};

/// Branch and bound over node presence. Among optimal vectors, the first in
/// node order with excluded before kept is returned. Throws BudgetExceeded
/// above the cell cap; on timeout the incumbent is returned with
/// optimal = false.
AssignmentResult solve_exact(const Mesh& precursor, const ResidualTable& costs, const AssignmentOptions& opts = {});

/// Per-cell voting followed by local repair sweeps over contested nodes.
AssignmentResult solve_heuristic(const Mesh& precursor, const ResidualTable& costs);

/// Substitutes the Super Element of every cell and merges shared nodes.
/// Throws NonConformalAssembly if the result has hanging nodes or edges.
Mesh assemble(const Mesh& precursor, const PresenceVector& presence, const TemplateLibrary& library,
              const NodeLayout& layout, bool check = true);

std::string presence_string(const PresenceVector& presence);

}  // namespace retrench
