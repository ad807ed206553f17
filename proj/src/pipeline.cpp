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

#include "retrench/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "retrench/error.hpp"

namespace retrench {

namespace {

using Clock = std::chrono::steady_clock;

std::string shipped_library() { return std::string(RETRENCH_DATA_DIR) + "/templates_max_min_sj.txt"; }

}  // namespace

NodeLayout load_layout(const PipelineConfig& cfg) {
  if (cfg.library.layout.empty()) return default_layout();
  return read_layout_file(cfg.resolve(cfg.library.layout));
}

GeometryModel build_geometry(const PipelineConfig& cfg) {
  const GeometrySource& g = cfg.geometry;
  double tess = g.tessellation > 0 ? g.tessellation : cfg.precursor.h / 8;
  GeometryModel m;
  if (g.kind == "box_minus_cylinder") {
    BoxMinusCylinder spec = g.cylinder;
    spec.tessellation = tess;
    m = make_box_minus_cylinder(spec);
  } else if (g.kind == "box") {
    m = make_box(g.lo, g.hi, tess);
  } else if (g.kind == "file") {
    m = read_geometry_files(cfg.resolve(g.stl), cfg.resolve(g.entities));
  } else if (g.kind == "empty") {
    m.tessellation = tess;
  } else {
    throw Error(ErrorCode::kInvalidInput, "unknown geometry kind " + g.kind);
  }
  m.seed = cfg.seed;
  for (const Curve& c : m.curves)
    for (int s : c.surfaces)
      if (!m.surface(s) && std::count_if(m.triangles.begin(), m.triangles.end(), [&](const Triangle& t) {
                             return t.surface == s;
                           }) == 0)
        throw Error(ErrorCode::kInvalidInput, "curve " + std::to_string(c.id) + " names missing surface " +
                                                  std::to_string(s));
  return m;
}

PrecursorMesh build_precursor(const PipelineConfig& cfg, const GeometryModel& model) {
  if (cfg.precursor.kind == "extrude") {
    QuadMesh profile = read_vtk_quads(cfg.resolve(cfg.precursor.profile));
    return extrude(profile, cfg.precursor.step, cfg.precursor.layers);
  }
  if (model.triangles.empty()) return PrecursorMesh{};
  BoxGridOptions opts;
  opts.margin = cfg.precursor.margin;
  opts.max_cells = cfg.precursor.max_cells;
  return box_grid(model.bounds(), cfg.precursor.h, opts);
}

Portfolio load_portfolio(const PipelineConfig& cfg, const NodeLayout& layout, bool* from_cache) {
  if (from_cache) *from_cache = false;
  std::string cache = cfg.resolve(cfg.library.portfolio_cache);
  if (!cache.empty()) {
    std::ifstream is(cache);
    if (is) {
      if (auto p = read_portfolio(is, layout, cfg.quality)) {
        if (from_cache) *from_cache = true;
        return *p;
      }
    }
  }
  EnumerationOptions opts;
  opts.threads = cfg.threads;
  Portfolio p = enumerate_portfolio(layout, cfg.quality, opts);
  if (!cache.empty()) {
    std::ofstream os(cache);
    if (!os) throw Error(ErrorCode::kIoError, "cannot write " + cache);
    write_portfolio(os, p);
  }
  return p;
}

TemplateLibrary load_library(const PipelineConfig& cfg, const NodeLayout& layout) {
  FacePatternTable patterns(layout, cfg.library.style);
  if (cfg.library.solve) {
    Portfolio p = load_portfolio(cfg, layout);
    SolveAllOptions opts;
    opts.solve.budget_seconds = cfg.library.budget_seconds;
    opts.threads = cfg.threads;
    return solve_all_cases(layout, p, patterns, cfg.library.objective, opts);
  }
  std::string path = cfg.library.path.empty() ? shipped_library() : cfg.resolve(cfg.library.path);
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read template library " + path);
  return read_library(is, layout, patterns);
}

void run_mesh(const PipelineConfig& cfg, const TemplateLibrary& library, const NodeLayout& layout, MeshRun& run) {
  auto t0 = Clock::now();
  auto stage = [&](const char* name) {
    auto now = Clock::now();
    if (!run.stage.empty())
      run.timings.push_back({run.stage, std::chrono::duration<double>(now - t0).count()});
    t0 = now;
    run.stage = name;
  };

  stage("geometry");
  run.model = build_geometry(cfg);

  stage("precursor");
  run.precursor = build_precursor(cfg, run.model);

  stage("assignment");
  OccupancyTable occ = occupancy_masks(library, layout);
  std::vector<Occupancy> geo = geometry_masks(run.precursor, run.model, cfg.threads);
  ResidualTable costs = residual_table(geo, occ);
  bool exact = cfg.assignment_solver == "exact" ||
               (cfg.assignment_solver == "auto" && run.precursor.mesh.cells.size() <= cfg.assignment.exact_cap);
  run.solver = exact ? "exact" : "heuristic";
  run.assignment = exact ? solve_exact(run.precursor.mesh, costs, cfg.assignment)
                         : solve_heuristic(run.precursor.mesh, costs);

  stage("assembly");
  run.retrenched = assemble(run.precursor.mesh, run.assignment.presence, library, layout);

  stage("mapping");
  run.colors = color_faces(run.retrenched, run.model);
  run.binding = bind_nodes(run.retrenched, run.colors, run.model, &run.binding_report);
  run.defeaturing = check_defeaturing(run.colors, run.model);
  Mesh projected = project_to_entities(run.retrenched, run.binding, run.model);

  stage("optimize");
  OptimizeConfig oc = cfg.optimize;
  oc.normalization = cfg.quality.normalization;
  if (oc.h <= 0) oc.h = run.precursor.h / 2;
  run.mesh = optimize(projected, run.binding, run.model, oc, &run.optimize);

  stage("validate");
  run.conformity = validate_conformity(run.mesh);
  run.max_binding_distance = max_binding_distance(run.mesh, run.binding, run.model);
  run.coverage = curve_coverage(run.mesh, run.binding, run.model, run.precursor.h);

  stage("");
  run.stage.clear();
}

}  // namespace retrench
