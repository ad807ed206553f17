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

#include "retrench/precursor.hpp"

#include <cmath>
#include <map>

#include "retrench/error.hpp"

namespace retrench {

PrecursorMesh box_grid(const Box3& bbox, double h, const BoxGridOptions& opts) {
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorCode::kInvalidInput, "edge length must be positive");
  if (bbox.empty()) throw Error(ErrorCode::kInvalidInput, "empty bounding box");
  if (opts.margin < 0) throw Error(ErrorCode::kInvalidInput, "negative margin");
  Vec3 ext = bbox.extent();
  PrecursorMesh out;
  out.h = h;
  Vec3 origin = bbox.lo - Vec3{1, 1, 1} * (h * opts.margin);
  double total = 1;
  for (int a = 0; a < 3; ++a) {
    if (!(ext[a] > 0)) throw Error(ErrorCode::kInvalidInput, "degenerate bounding box");
    // Guard against extents that are an exact multiple of h up to rounding.
    out.dims[a] = std::max(1, static_cast<int>(std::ceil(ext[a] / h - 1e-9))) + 2 * opts.margin;
    total *= out.dims[a];
  }
  if (total > static_cast<double>(opts.max_cells))
    throw Error(ErrorCode::kBudgetExceeded, "precursor grid would have " + std::to_string(static_cast<long long>(total)) + " cells");
  auto [nx, ny, nz] = out.dims;
  auto id = [&](int i, int j, int k) { return static_cast<int32_t>(i + (nx + 1) * (j + (ny + 1) * k)); };
  out.mesh.nodes.reserve(size_t(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) out.mesh.nodes.push_back(origin + Vec3{double(i), double(j), double(k)} * h);
  out.mesh.cells.reserve(size_t(total));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out.mesh.cells.emplace_back(CellKind::kHex,
                                    std::vector<int32_t>{id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k),
                                                         id(i, j + 1, k), id(i, j, k + 1), id(i + 1, j, k + 1),
                                                         id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
  return out;
}

PrecursorMesh extrude(const QuadMesh& profile, const Vec3& step, int layers) {
  if (layers < 1) throw Error(ErrorCode::kInvalidInput, "layers must be at least 1");
  if (!(norm(step) > 0)) throw Error(ErrorCode::kInvalidInput, "zero sweep step");
  size_t n = profile.nodes.size();
  std::map<std::pair<int32_t, int32_t>, int> edge_use;
  for (const auto& q : profile.quads) {
    for (int k = 0; k < 4; ++k) {
      if (q[k] < 0 || static_cast<size_t>(q[k]) >= n) throw Error(ErrorCode::kInvalidProfile, "quad references a missing node");
      for (int l = k + 1; l < 4; ++l)
        if (q[k] == q[l]) throw Error(ErrorCode::kInvalidProfile, "quad repeats a node");
      int32_t a = q[k], b = q[(k + 1) % 4];
      if (++edge_use[{std::min(a, b), std::max(a, b)}] > 2)
        throw Error(ErrorCode::kInvalidProfile, "profile edge shared by more than two quads");
    }
    Vec3 nrm = cross(profile.nodes[q[2]] - profile.nodes[q[0]], profile.nodes[q[3]] - profile.nodes[q[1]]);
    if (std::fabs(dot(nrm, step)) <= 1e-12 * norm(nrm) * norm(step))
      throw Error(ErrorCode::kInvalidProfile, "quad is degenerate or parallel to the sweep");
  }
  PrecursorMesh out;
  out.h = norm(step);
  for (int l = 0; l <= layers; ++l)
    for (const Vec3& p : profile.nodes) out.mesh.nodes.push_back(p + step * double(l));
  for (int l = 0; l < layers; ++l)
    for (const auto& q0 : profile.quads) {
      auto q = q0;
      Vec3 nrm = cross(profile.nodes[q[2]] - profile.nodes[q[0]], profile.nodes[q[3]] - profile.nodes[q[1]]);
      // Hex bottom faces point against the sweep.
      if (dot(nrm, step) < 0) std::swap(q[1], q[3]);
      std::vector<int32_t> c(8);
      for (int k = 0; k < 4; ++k) {
        c[k] = static_cast<int32_t>(l * n + q[k]);
        c[k + 4] = static_cast<int32_t>((l + 1) * n + q[k]);
      }
      out.mesh.cells.emplace_back(CellKind::kHex, std::move(c));
    }
  return out;
}

}  // namespace retrench
