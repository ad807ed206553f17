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
#include <numeric>
#include <optional>

#include "retrench/vec.hpp"

namespace retrench::exact {

inline int sign(int64_t v) { return (v > 0) - (v < 0); }

/// Half-space dot(n, x) <= d.
struct Plane {
  IVec3 n;
  int64_t d = 0;
};

/// Plane through a, b, c with normal (b - a) x (c - a), reduced by the gcd.
inline Plane plane_through(const IVec3& a, const IVec3& b, const IVec3& c) {
  IVec3 n = cross(b - a, c - a);
  int64_t g = std::gcd(std::gcd(n.x < 0 ? -n.x : n.x, n.y < 0 ? -n.y : n.y), n.z < 0 ? -n.z : n.z);
  if (g > 1) n = {n.x / g, n.y / g, n.z / g};
  return {n, dot(n, a)};
}

inline int side(const Plane& p, const IVec3& x) { return sign(dot(p.n, x) - p.d); }

inline int orient(const IVec3& a, const IVec3& b, const IVec3& c, const IVec3& d) {
  return sign(triple(b - a, c - a, d - a));
}

/// Rational point num / den with den > 0.
struct RPoint {
  IVec3 num;
  int64_t den = 1;
};

inline int side(const Plane& p, const RPoint& x) { return sign(dot(p.n, x.num) - p.d * x.den); }

/// Common point of three planes, if their normals are independent.
inline std::optional<RPoint> intersect(const Plane& a, const Plane& b, const Plane& c) {
  int64_t det = triple(a.n, b.n, c.n);
  if (det == 0) return std::nullopt;
  IVec3 num = cross(b.n, c.n) * a.d + cross(c.n, a.n) * b.d + cross(a.n, b.n) * c.d;
  if (det < 0) {
    det = -det;
    num = {-num.x, -num.y, -num.z};
  }
  return RPoint{num, det};
}

inline bool equals(const RPoint& p, const IVec3& q) { return p.num == q * p.den; }

/// p lies on the line through a and b.
inline bool collinear(const RPoint& p, const IVec3& a, const IVec3& b) {
  return cross(p.num - a * p.den, b - a) == IVec3{};
}

}  // namespace retrench::exact
