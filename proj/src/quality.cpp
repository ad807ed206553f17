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

#include "retrench/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "retrench/error.hpp"

namespace retrench {

double SjNormalization::factor(CellKind kind) const {
  switch (kind) {
    case CellKind::kTet: return tet;
    case CellKind::kPyramid: return pyramid;
    case CellKind::kPrism: return prism;
    case CellKind::kHex: return hex;
  }
  return 1.0;
}

double QualityConfig::threshold(CellKind kind) const {
  switch (kind) {
    case CellKind::kTet: return sj_min_tet;
    case CellKind::kPyramid: return sj_min_pyramid;
    case CellKind::kPrism: return sj_min_prism;
    case CellKind::kHex: return sj_min_hex;
  }
  return 1.0;
}

void QualityConfig::validate() const {
  for (CellKind k : kAllCellKinds) {
    double t = threshold(k);
    if (!(t > 0.0 && t <= 1.0))
      throw Error(ErrorCode::kInvalidInput,
                  "quality threshold for " + std::string(kind_name(k)) + " must lie in (0, 1]");
  }
}

std::string quality_signature(const QualityConfig& c) {
  char buf[512];
  const SjNormalization& n = c.normalization;
  std::snprintf(buf, sizeof(buf), "quality %.17g %.17g %.17g %.17g norm %.17g %.17g %.17g %.17g",
                c.sj_min_tet, c.sj_min_pyramid, c.sj_min_prism, c.sj_min_hex, n.tet, n.pyramid, n.prism,
                n.hex);
  return buf;
}

double scaled_jacobian(CellKind kind, std::span<const Vec3> pts, const SjNormalization& nz,
                       double eps) {
  if (static_cast<int>(pts.size()) != node_count(kind))
    throw Error(ErrorCode::kInvalidInput, "point count does not match cell kind");
  double worst = std::numeric_limits<double>::infinity();
  for (const JacobianCorner& c : jacobian_corners(kind)) {
    Vec3 e[3];
    for (int i = 0; i < 3; ++i) {
      e[i] = pts[c.to[i]] - pts[c.origin];
      double len = norm(e[i]);
      if (!(len >= eps)) throw Error(ErrorCode::kDegenerateElement, "zero-length corner edge");
      e[i] = e[i] / len;
    }
    worst = std::min(worst, triple(e[0], e[1], e[2]));
  }
  return std::clamp(worst * nz.factor(kind), -1.0, 1.0);
}

double scaled_jacobian(const Cell& cell, std::span<const Vec3> nodes, const SjNormalization& norm,
                       double eps) {
  std::array<Vec3, 8> pts;
  for (size_t i = 0; i < cell.nodes.size(); ++i) pts[i] = nodes[cell.nodes[i]];
  return scaled_jacobian(cell.kind, std::span<const Vec3>(pts.data(), cell.nodes.size()), norm, eps);
}

double scaled_jacobian_or_invalid(const Cell& cell, std::span<const Vec3> nodes,
                                  const SjNormalization& norm) {
  try {
    return scaled_jacobian(cell, nodes, norm);
  } catch (const Error&) {
    return -1.0;
  }
}

bool is_coplanar(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4, double eps_rel) {
  Vec3 a = p2 - p1, b = p3 - p1, c = p4 - p1;
  double scale = std::max({norm(a), norm(b), norm(c), distance(p2, p3), distance(p2, p4),
                           distance(p3, p4)});
  return std::fabs(triple(a, b, c)) < eps_rel * scale * scale * scale;
}

Vec3 polygon_normal(std::span<const Vec3> poly) {
  Vec3 n;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % poly.size()];
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  return n;
}

bool locally_convex(std::span<const Vec3> face_a, std::span<const Vec3> face_b,
                    const std::array<Vec3, 2>& edge, double eps_angle) {
  Vec3 na = normalized(polygon_normal(face_a));
  Vec3 axis = normalized(edge[1] - edge[0]);
  // farthest vertex of B from the shared edge line
  Vec3 best_d;
  double best_len = -1;
  for (const Vec3& q : face_b) {
    Vec3 d = q - edge[0];
    d -= axis * dot(d, axis);
    double len = norm(d);
    if (len > best_len) {
      best_len = len;
      best_d = d;
    }
  }
  if (best_len <= 0) return true;
  double s = dot(na, best_d / best_len);
  return s <= std::sin(eps_angle);
}

}  // namespace retrench
