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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retrench/vec.hpp"

namespace retrench {

struct Triangle {
  std::array<int32_t, 3> v;
  int surface = 0;
};

enum class SurfaceShape { kGeneric, kPlane, kCylinder };

/// Analytic description used for exact projection where available.
struct SurfaceInfo {
  int id = 0;
  SurfaceShape shape = SurfaceShape::kGeneric;
  Vec3 point;      // plane point or axis point
  Vec3 direction;  // plane normal or axis direction (unit)
  double radius = 0;
};

enum class CurveShape { kPolyline, kCircle };

struct Curve {
  int id = 0;
  std::array<int, 2> surfaces{0, 0};
  /// Indices into GeometryModel::vertices.
  std::vector<int32_t> points;
  bool closed = false;
  CurveShape shape = CurveShape::kPolyline;
  Vec3 center, axis;
  double radius = 0;
};

struct Corner {
  int id = 0;
  Vec3 point;
  std::vector<int> surfaces;
};

struct RayHit {
  int32_t triangle = -1;
  int surface = 0;
  double t = 0;
  Vec3 point;
};

class Bvh {
 public:
  struct Node {
    Box3 box;
    int32_t left = -1, right = -1;
    int32_t first = 0, count = 0;
  };

  void build(const std::vector<Vec3>& verts, const std::vector<Triangle>& tris, std::vector<int32_t> subset);
  bool empty() const { return nodes_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int32_t>& order() const { return order_; }

 private:
  std::vector<Node> nodes_;
  std::vector<int32_t> order_;
};

/// Tagged triangle model with polyline curves and corner points.
struct GeometryModel {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<SurfaceInfo> surfaces;
  std::vector<Curve> curves;
  std::vector<Corner> corners;
  double tessellation = 0;
  /// Seeds the ray directions of point_inside.
  uint64_t seed = 1;

  Box3 bounds() const;
  double eps_geom() const { return 1e-9 * bounds().diagonal(); }
  const SurfaceInfo* surface(int id) const;
  std::vector<int> surface_ids() const;

  /// Builds the acceleration structures; call after editing triangles.
  void build();
  const Bvh& bvh() const { return bvh_; }
  const Bvh& surface_bvh(int id) const;

 private:
  Bvh bvh_;
  std::map<int, Bvh> surface_bvh_;
};

/// Line-triangle intersection (any parameter sign); inclusive edges.
std::optional<RayHit> intersect_triangle(const GeometryModel& m, int32_t tri, const Vec3& origin, const Vec3& dir);

/// True when hit a is preferred to b: smaller |t|, then positive t, then
/// lower triangle index.
bool better_hit(const RayHit& a, const RayHit& b);

/// Nearest intersection along the whole line through origin.
std::optional<RayHit> raycast_first(const GeometryModel& m, const Vec3& origin, const Vec3& dir);
/// Same result by scanning every triangle.
std::optional<RayHit> raycast_first_brute(const GeometryModel& m, const Vec3& origin, const Vec3& dir);

struct ClosestPoint {
  Vec3 point;
  double distance = INFINITY;
  int32_t triangle = -1;
};

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
/// Closest point on all triangles, or on one surface's triangles.
ClosestPoint closest_point(const GeometryModel& m, const Vec3& p, int surface = -1);

/// Parity of crossings along three seeded directions; points within eps of
/// the surface count as inside. Throws NonWatertight when the directions
/// disagree.
bool point_inside(const GeometryModel& m, const Vec3& p, double eps = -1);

struct BoxMinusCylinder {
  Vec3 size{1, 1, 1};
  double radius = 0.25;
  /// Hole axis 0 = x, 1 = y, 2 = z, through the box center.
  int axis = 2;
  double tessellation = 0.0625;
};

/// Box [0, size] with a through hole. Surfaces 1-6 are the planes x=0, x=1,
/// y=0, y=1, z=0, z=1 in the hole frame, 7 the cylinder; 12 edge curves, 2
/// circles and 8 corners. Throws InvalidDims.
GeometryModel make_box_minus_cylinder(const BoxMinusCylinder& spec);

/// Axis-aligned box [lo, hi] with the same surface numbering.
GeometryModel make_box(const Vec3& lo, const Vec3& hi, double tessellation);

/// Every triangle edge used by exactly two triangles in opposite directions.
bool watertight(const GeometryModel& m);
/// V - E + F of the tessellation.
int euler_characteristic(const GeometryModel& m);

/// STL-like ASCII with a "surface <id>" line per facet.
void write_tagged_stl(std::ostream& os, const GeometryModel& m);
/// Sidecar listing analytic surfaces, curves (vertex indices in order of
/// first appearance in the STL) and corners.
void write_entities(std::ostream& os, const GeometryModel& m);
GeometryModel read_geometry(std::istream& stl, std::istream* entities);
GeometryModel read_geometry_files(const std::string& stl_path, const std::string& entities_path);
void write_geometry_files(const GeometryModel& m, const std::string& stl_path, const std::string& entities_path);

}  // namespace retrench
