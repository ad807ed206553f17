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
#include <span>
#include <string>
#include <vector>

#include "retrench/cell.hpp"
#include "retrench/vec.hpp"

namespace retrench {

/// Per-kind multipliers applied to the minimum corner determinant so that
/// the ideal element of each kind scores 1.
struct SjNormalization {
  double tet = 1.4142135623730951;      // regular tetrahedron
  double pyramid = 1.4142135623730951;  // square base, all edges equal
  double prism = 1.1547005383792515;    // equilateral triangle, unit height
  double hex = 1.0;                     // cube

  double factor(CellKind kind) const;
};

struct QualityConfig {
  double sj_min_tet = 0.16;
  double sj_min_hex = 0.3;
  double sj_min_prism = 0.45;
  double sj_min_pyramid = 0.35;
  SjNormalization normalization;

  double threshold(CellKind kind) const;
  /// Throws InvalidInput unless all thresholds lie in (0, 1].
  void validate() const;
};

/// Scaled Jacobian: the minimum over the evaluation corners of the
/// determinant of the unit edge vectors at that corner, times the kind's
/// normalization, clamped to [-1, 1]. Pyramids are evaluated at the four base
/// corners. Throws DegenerateElement when a corner edge is shorter than `eps`.
/// One-line text form of all thresholds and factors at full precision; used
/// as a cache and library key.
std::string quality_signature(const QualityConfig& c);

double scaled_jacobian(CellKind kind, std::span<const Vec3> pts,
                       const SjNormalization& norm = {}, double eps = 1e-12);
double scaled_jacobian(const Cell& cell, std::span<const Vec3> nodes,
                       const SjNormalization& norm = {}, double eps = 1e-12);

/// Same as scaled_jacobian but returns -1 instead of throwing on degenerate
/// edges.
double scaled_jacobian_or_invalid(const Cell& cell, std::span<const Vec3> nodes,
                                  const SjNormalization& norm = {});

/// True iff the scalar triple product of the edge vectors from p1 is below
/// `eps_rel` times the cube of the longest edge.
bool is_coplanar(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                 double eps_rel = 1e-9);

/// Faces are given in hull orientation (right-hand normal outward) and share
/// `edge`. True iff the interior dihedral angle across the edge is at most
/// 180 degrees plus `eps_angle` radians.
bool locally_convex(std::span<const Vec3> face_a, std::span<const Vec3> face_b,
                    const std::array<Vec3, 2>& edge, double eps_angle = 1e-6);

/// Newell normal of a polygon (not normalized).
Vec3 polygon_normal(std::span<const Vec3> poly);

}  // namespace retrench
