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

#include "retrench/assignment.hpp"
#include "retrench/geometry.hpp"
#include "retrench/mapping.hpp"
#include "retrench/precursor.hpp"
#include "retrench/subdivision.hpp"

namespace retrench {

struct GeometrySource {
  /// box_minus_cylinder, box, file or empty.
  std::string kind = "box_minus_cylinder";
  BoxMinusCylinder cylinder;
  Vec3 lo{0, 0, 0}, hi{1, 1, 1};
  std::string stl;
  std::string entities;
  /// Tessellation length of generated models; zero means precursor h / 8.
  double tessellation = 0;
};

struct PrecursorSource {
  /// box_grid or extrude.
  std::string kind = "box_grid";
  double h = 0.125;
  int margin = 0;
  size_t max_cells = 4'000'000;
  std::string profile;
  Vec3 step{0, 0, 0.125};
  int layers = 8;
};

struct LibrarySource {
  /// Template library file; empty means the shipped one.
  std::string path;
  /// Solve all cases instead of reading a file.
  bool solve = false;
  Objective objective = Objective::kMaxMinSJ;
  PatternStyle style = PatternStyle::kFull;
  double budget_seconds = 600;
  /// Portfolio cache read before enumerating and written after.
  std::string portfolio_cache;
  /// Node layout file; empty means the default 35-node layout.
  std::string layout;
};

struct PipelineConfig {
  GeometrySource geometry;
  PrecursorSource precursor;
  LibrarySource library;
  QualityConfig quality;
  AssignmentOptions assignment;
  /// auto (exact up to the cap, heuristic above), exact or heuristic.
  std::string assignment_solver = "auto";
  OptimizeConfig optimize;
  std::string out_dir = "out";
  uint64_t seed = 1;
  int threads = 1;
  /// Directory relative paths are resolved against.
  std::string base_dir = ".";

  /// Throws InvalidInput on nonpositive sizes or budgets and IoError on
  /// missing input files.
  void validate() const;
  /// Path relative to base_dir unless absolute.
  std::string resolve(const std::string& path) const;
};

/// Reads a YAML configuration; unknown keys are rejected.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text, const std::string& base_dir = ".");

NodeLayout load_layout(const PipelineConfig& cfg);
GeometryModel build_geometry(const PipelineConfig& cfg);
PrecursorMesh build_precursor(const PipelineConfig& cfg, const GeometryModel& model);

/// Portfolio from the cache when its header matches, else enumerated (and
/// cached when a cache path is set).
Portfolio load_portfolio(const PipelineConfig& cfg, const NodeLayout& layout, bool* from_cache = nullptr);
TemplateLibrary load_library(const PipelineConfig& cfg, const NodeLayout& layout);

struct StageTiming {
  std::string stage;
  double seconds = 0;
};

struct MeshRun {
  GeometryModel model;
  PrecursorMesh precursor;
  AssignmentResult assignment;
  std::string solver;
  Mesh retrenched;
  Mesh mesh;
  FaceColoring colors;
  EntityBinding binding;
  BindingReport binding_report;
  DefeaturingReport defeaturing;
  OptimizeReport optimize;
  ConformityReport conformity;
  std::vector<CurveCoverage> coverage;
  double max_binding_distance = 0;
  std::vector<StageTiming> timings;
  /// Stage running when the last exception escaped; empty on success.
  std::string stage;
};

/// Geometry, precursor, assignment, assembly, mapping and optimization.
/// `run.stage` names the current stage so callers can report failures.
void run_mesh(const PipelineConfig& cfg, const TemplateLibrary& library, const NodeLayout& layout, MeshRun& run);

}  // namespace retrench
