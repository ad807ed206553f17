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
#include <cstddef>

#include "retrench/mesh.hpp"
#include "retrench/vtk.hpp"

namespace retrench {

/// All-hex stock mesh; each cell's nodes are its 8 corners in hex order.
struct PrecursorMesh {
  Mesh mesh;
  double h = 1;
  /// Cells per axis for box grids; zero for extruded meshes.
  std::array<int, 3> dims{0, 0, 0};
};

struct BoxGridOptions {
  /// Extra cell layers added around the box on every side.
  int margin = 0;
  size_t max_cells = 4'000'000;
};

/// Uniform grid of cubes of side h starting at the (inflated) box minimum,
/// ceil(extent / h) cells per axis. Throws InvalidInput for a bad box or h
/// and BudgetExceeded above max_cells.
PrecursorMesh box_grid(const Box3& bbox, double h, const BoxGridOptions& opts = {});

/// Sweeps a planar quad profile `layers` times by `step`. Quads are
/// reoriented so every hex has positive volume. Throws InvalidProfile for
/// degenerate or non-manifold profiles.
PrecursorMesh extrude(const QuadMesh& profile, const Vec3& step, int layers);

}  // namespace retrench
