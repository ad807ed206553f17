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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "retrench/assignment.hpp"
#include "retrench/pipeline.hpp"
#include "retrench/vtk.hpp"

namespace retrench::test {

inline const NodeLayout& layout() {
  static const NodeLayout l = default_layout();
  return l;
}

inline const TemplateLibrary& shipped_library() {
  static const TemplateLibrary lib = load_library(PipelineConfig{}, layout());
  return lib;
}

// Full default-layout portfolio, cached next to the test binaries.
inline const Portfolio& full_portfolio() {
  static const Portfolio p = [] {
    PipelineConfig cfg;
    cfg.library.portfolio_cache = std::string(RETRENCH_TEST_CACHE_DIR) + "/portfolio_default.txt";
    return load_portfolio(cfg, layout());
  }();
  return p;
}

inline Box3 box(const Vec3& lo, const Vec3& hi) {
  Box3 b;
  b.expand(lo);
  b.expand(hi);
  return b;
}

inline Mesh grid(int nx, int ny, int nz, double h = 1.0) {
  return box_grid(box({0, 0, 0}, {nx * h, ny * h, nz * h}), h).mesh;
}

inline std::string vtk_string(const Mesh& m) {
  std::ostringstream os;
  write_vtk(os, m);
  return os.str();
}

inline double min_quality(const Mesh& m) {
  double lo = 1;
  for (double s : cell_quality(m)) lo = std::min(lo, s);
  return lo;
}

inline Vec3 random_rotation_apply(const std::array<double, 9>& r, const Vec3& p) {
  return {r[0] * p.x + r[1] * p.y + r[2] * p.z, r[3] * p.x + r[4] * p.y + r[5] * p.z,
          r[6] * p.x + r[7] * p.y + r[8] * p.z};
}

// Uniform random rotation from a normalized Gaussian quaternion.
inline std::array<double, 9> random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n, x /= n, y /= n, z /= n;
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

}  // namespace retrench::test
