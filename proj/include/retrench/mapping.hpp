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

#include <cstdint>
#include <string>
#include <vector>

#include "retrench/geometry.hpp"
#include "retrench/mesh.hpp"
#include "retrench/quality.hpp"

namespace retrench {

enum class EntityKind : uint8_t { kInterior = 0, kSurface = 1, kCurve = 2, kCorner = 3 };

std::string_view entity_kind_name(EntityKind kind);

struct Binding {
  EntityKind kind = EntityKind::kInterior;
  int id = 0;
  bool operator==(const Binding&) const = default;
};

/// One binding per mesh node.
using EntityBinding = std::vector<Binding>;

struct FaceColoring {
  FaceTable table;
  /// Indices into table.faces of the boundary faces, and their surface ids.
  std::vector<int32_t> faces;
  std::vector<int> color;
  /// Faces whose normal line missed the model; colored by nearest triangle.
  int unmapped = 0;
  /// Faces whose first hit lay more than twice their longest edge away; the
  /// line grazed past the nearby surface, so they too take the nearest
  /// triangle's color.
  int far_hits = 0;
};

/// Colors each boundary face by the first hit of the line through its
/// centroid along its outward normal, at either parameter sign.
FaceColoring color_faces(const Mesh& mesh, const GeometryModel& model);

struct BindingReport {
  /// Nodes that needed a curve or corner the model lacks; they were bound
  /// to the nearest entity of that dimension.
  int missing_curves = 0;
  int missing_corners = 0;
  /// Curve nodes moved back to a surface because a whole face had collapsed
  /// onto one curve.
  int demoted = 0;
};

EntityBinding bind_nodes(const Mesh& mesh, const FaceColoring& colors, const GeometryModel& model,
                         BindingReport* report = nullptr);

/// Closest point of `p` on the bound entity. Cylinders and circles are
/// projected analytically, planes and polylines through the tessellation.
Vec3 project_point(const GeometryModel& model, const Binding& b, const Vec3& p);

Mesh project_to_entities(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model);

/// Largest distance of a bound node from its entity.
double max_binding_distance(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model);

struct CurveCoverage {
  int curve = 0;
  double length = 0;
  /// Equal pieces of length at most h, and how many hold a bound node.
  int pieces = 0;
  int covered = 0;
};

/// Splits each curve into pieces no longer than h and counts the pieces
/// containing the projection of a node bound to the curve or to one of its
/// end corners.
std::vector<CurveCoverage> curve_coverage(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model,
                                          double h);

struct DefeaturingReport {
  std::vector<int> present;
  /// Model surfaces no boundary face was colored with.
  std::vector<int> neglected;
};

DefeaturingReport check_defeaturing(const FaceColoring& colors, const GeometryModel& model);

struct OptimizeConfig {
  double threshold = 0.2;
  /// Target edge length; zero estimates it as the median mesh edge length.
  double h = 0;
  int max_iterations = 32;
  int smoothing_sweeps = 4;
  SjNormalization normalization;
};

struct OptimizeReport {
  double min_sj_before = 0;
  double min_sj_after = 0;
  int low_cells_before = 0;
  int low_cells_after = 0;
  int surface_moves = 0;
  int volume_moves = 0;
  /// Low cells the descent could not improve.
  std::vector<int32_t> unimprovable;
};

/// Safeguarded Laplacian smoothing of boundary nodes on their entities, then
/// coordinate descent on the nodes of each cell below the threshold, lowest
/// first. Corner-bound nodes never move; an accepted move leaves every cell
/// around the moved node at or above min(prior SJ, max(threshold, mesh
/// minimum)), so the mesh minimum never drops.
Mesh optimize(const Mesh& mesh, const EntityBinding& binding, const GeometryModel& model,
              const OptimizeConfig& cfg = {}, OptimizeReport* report = nullptr);

std::vector<double> cell_quality(const Mesh& mesh, const SjNormalization& norm = {});

}  // namespace retrench
