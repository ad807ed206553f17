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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "retrench/mesh.hpp"

namespace retrench {

/// Named per-cell scalar field written as CELL_DATA.
struct CellField {
  std::string name;
  std::vector<double> values;
};

/// Writes a VTK legacy ASCII unstructured grid. Coordinates use 17
/// significant digits so reading the file back is lossless.
void write_vtk(std::ostream& os, const Mesh& mesh, const std::vector<CellField>& fields = {},
               const std::string& title = "retrench mesh");
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<CellField>& fields = {},
               const std::string& title = "retrench mesh");

Mesh read_vtk(std::istream& is);
Mesh read_vtk(const std::string& path);

/// Planar quad mesh (z ignored by consumers that sweep it).
struct QuadMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<int32_t, 4>> quads;
};

/// Reads a VTK legacy 2D mesh. Throws InvalidProfile when a cell is not a quad.
QuadMesh read_vtk_quads(std::istream& is);
QuadMesh read_vtk_quads(const std::string& path);
void write_vtk_quads(std::ostream& os, const QuadMesh& mesh);

}  // namespace retrench
