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

// Command-line driver: portfolio, solve-cases, census, mesh, validate, stats.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "retrench/error.hpp"
#include "retrench/pipeline.hpp"
#include "retrench/vtk.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace retrench;

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  int64_t seed = -1;
  int threads = 0;
  double budget_seconds = 0;
};

PipelineConfig make_config(const GlobalFlags& f) {
  PipelineConfig cfg = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.seed >= 0) cfg.seed = static_cast<uint64_t>(f.seed);
  if (f.threads > 0) cfg.threads = f.threads;
  if (f.budget_seconds > 0) {
    cfg.library.budget_seconds = f.budget_seconds;
    cfg.assignment.budget_seconds = f.budget_seconds;
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  os << text;
}

json quality_json(const Mesh& mesh, const SjNormalization& norm) {
  std::vector<double> q = cell_quality(mesh, norm);
  std::vector<int> hist(20, 0);
  double lo = 1, sum = 0;
  for (double s : q) {
    lo = std::min(lo, s);
    sum += s;
    int bin = std::clamp(static_cast<int>(std::floor((s + 1) * 10)), 0, 19);
    ++hist[bin];
  }
  json j;
  j["cells"] = q.size();
  j["min_sj"] = q.empty() ? 0.0 : lo;
  j["mean_sj"] = q.empty() ? 0.0 : sum / q.size();
  j["sj_histogram"] = json::array();
  for (int b = 0; b < 20; ++b)
    j["sj_histogram"].push_back({{"from", -1 + 0.1 * b}, {"to", -0.9 + 0.1 * b}, {"count", hist[b]}});
  std::map<std::string, int> kinds;
  for (const Cell& c : mesh.cells) ++kinds[std::string(kind_name(c.kind))];
  j["kinds"] = kinds;
  ValenceStats v = node_valences(mesh);
  std::map<int, int> vh;
  for (int x : v.valence) ++vh[x];
  json vj = json::object();
  for (auto [k, n] : vh) vj[std::to_string(k)] = n;
  j["max_valence"] = v.max;
  j["valence_histogram"] = vj;
  return j;
}

json conformity_json(const ConformityReport& r) {
  return {{"conforming", r.conforming()},
          {"non_manifold_faces", r.non_manifold_faces.size()},
          {"hanging_nodes", r.hanging_nodes.size()},
          {"hanging_edges", r.hanging_edges.size()},
          {"face_components", r.face_components},
          {"node_components", r.node_components}};
}

// Runs `body` and always writes the JSON report; returns the exit code.
int with_report(const fs::path& out_dir, const std::string& command, json& report,
                const std::function<void(std::string& stage)>& body) {
  report["command"] = command;
  std::string stage = "setup";
  int code = 0;
  auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(out_dir);
    body(stage);
    report["status"] = "ok";
  } catch (const Error& e) {
    report["status"] = "error";
    report["failed_stage"] = stage;
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    std::cerr << "error [" << to_string(e.code()) << "] in " << stage << ": " << e.what() << "\n";
    code = 1;
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["failed_stage"] = stage;
    report["error"] = {{"code", "Internal"}, {"message", e.what()}};
    std::cerr << "error in " << stage << ": " << e.what() << "\n";
    code = 1;
  }
  report["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    fs::create_directories(out_dir);
    write_text(out_dir / (command + "_report.json"), report.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "cannot write report: " << e.what() << "\n";
    code = 1;
  }
  return code;
}

int cmd_portfolio(const GlobalFlags& flags) {
  json report;
  PipelineConfig cfg;
  fs::path out = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
  return with_report(out, "portfolio", report, [&](std::string& stage) {
    stage = "config";
    cfg = make_config(flags);
    out = cfg.out_dir;
    fs::create_directories(out);
    cfg.validate();
    stage = "enumerate";
    if (cfg.library.portfolio_cache.empty()) cfg.library.portfolio_cache = (out / "portfolio.txt").string();
    NodeLayout layout = load_layout(cfg);
    bool cached = false;
    Portfolio p = load_portfolio(cfg, layout, &cached);
    std::string table = format_counts(p.counts, cfg.quality);
    write_text(out / "portfolio_counts.txt", table);
    std::cout << table;
    report["layout_nodes"] = layout.size();
    report["from_cache"] = cached;
    report["stored_elements"] = p.elements.size();
    for (int k = 0; k < 4; ++k) {
      std::string name(kind_name(static_cast<CellKind>(k)));
      report["counts"][name] = {{"raw", p.counts.raw[k]}, {"filtered", p.counts.filtered[k]}};
    }
  });
}

int cmd_solve_cases(const GlobalFlags& flags, const std::vector<int>& cases) {
  json report;
  PipelineConfig cfg;
  fs::path out = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
  return with_report(out, "solve-cases", report, [&](std::string& stage) {
    stage = "config";
    cfg = make_config(flags);
    out = cfg.out_dir;
    fs::create_directories(out);
    cfg.validate();
    NodeLayout layout = load_layout(cfg);
    stage = "portfolio";
    if (cfg.library.portfolio_cache.empty()) cfg.library.portfolio_cache = (out / "portfolio.txt").string();
    Portfolio p = load_portfolio(cfg, layout);
    stage = "solve";
    FacePatternTable patterns(layout, cfg.library.style);
    SolveAllOptions opts;
    opts.solve.budget_seconds = cfg.library.budget_seconds;
    opts.threads = cfg.threads;
    opts.cases = cases;
    TemplateLibrary lib = solve_all_cases(layout, p, patterns, cfg.library.objective, opts);
    stage = "write";
    std::ofstream os(out / "templates.txt");
    write_library(os, lib);
    std::string table = format_case_report(lib);
    write_text(out / "cases.txt", table);
    std::cout << table;
    report["objective"] = std::string(objective_name(lib.objective));
    json rows = json::array();
    int unsolved = 0;
    for (const LibraryEntry& e : lib.entries) {
      const char* status = e.status == CaseStatus::kSolved ? "solved"
                           : e.status == CaseStatus::kInfeasible ? "infeasible" : "unsolved";
      unsolved += e.status != CaseStatus::kSolved;
      rows.push_back({{"case", e.canonical.case_id},
                      {"mask", mask_string(e.canonical.representative)},
                      {"orbit", e.canonical.orbit_size},
                      {"status", status},
                      {"optimal", e.tmpl.optimal},
                      {"elements", e.tmpl.element_count()},
                      {"min_sj", e.tmpl.min_sj},
                      {"max_valence", e.tmpl.max_valence},
                      {"seconds", e.seconds}});
    }
    report["cases"] = rows;
    if (unsolved && cases.empty())
      throw Error(ErrorCode::kBudgetExceeded, std::to_string(unsolved) + " cases without a template");
  });
}

int cmd_census() {
  int total = 0;
  std::printf("%-5s %-9s %6s\n", "case", "mask", "orbit");
  for (const CanonicalCase& c : orbit_census()) {
    std::printf("%-5d %-9s %6d\n", c.case_id, mask_string(c.representative).c_str(), c.orbit_size);
    total += c.orbit_size;
  }
  std::printf("cases %zu masks %d\n", orbit_census().size(), total);
  return 0;
}

int cmd_mesh(const GlobalFlags& flags) {
  json report;
  PipelineConfig cfg;
  MeshRun run;
  fs::path out = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
  return with_report(out, "mesh", report, [&](std::string& stage) {
    stage = "config";
    cfg = make_config(flags);
    out = cfg.out_dir;
    fs::create_directories(out);
    report["seed"] = cfg.seed;
    cfg.validate();
    stage = "library";
    NodeLayout layout = load_layout(cfg);
    TemplateLibrary lib = load_library(cfg, layout);
    try {
      run_mesh(cfg, lib, layout, run);
    } catch (...) {
      stage = run.stage;
      throw;
    }
    stage = "write";
    std::vector<CellField> fields{{"scaled_jacobian", cell_quality(run.mesh, cfg.quality.normalization)}};
    write_vtk((out / "mesh.vtk").string(), run.mesh, fields);
    json timings = json::object();
    for (const StageTiming& t : run.timings) timings[t.stage] = t.seconds;
    report["timings"] = timings;
    report["precursor"] = {{"cells", run.precursor.mesh.cells.size()},
                           {"nodes", run.precursor.mesh.nodes.size()},
                           {"h", run.precursor.h}};
    report["assignment"] = {{"solver", run.solver},
                            {"objective", run.assignment.objective},
                            {"optimal", run.assignment.optimal},
                            {"presence", presence_string(run.assignment.presence)}};
    report["retrenched"] = quality_json(run.retrenched, cfg.quality.normalization);
    report["mesh"] = quality_json(run.mesh, cfg.quality.normalization);
    report["conformity"] = conformity_json(run.conformity);
    report["mapping"] = {{"boundary_faces", run.colors.faces.size()},
                         {"unmapped_faces", run.colors.unmapped},
                         {"far_hits", run.colors.far_hits},
                         {"missing_curves", run.binding_report.missing_curves},
                         {"missing_corners", run.binding_report.missing_corners},
                         {"demoted", run.binding_report.demoted},
                         {"max_binding_distance", run.max_binding_distance}};
    report["defeaturing"] = {{"present", run.defeaturing.present}, {"neglected", run.defeaturing.neglected}};
    json cov = json::array();
    for (const CurveCoverage& c : run.coverage)
      cov.push_back({{"curve", c.curve}, {"length", c.length}, {"pieces", c.pieces}, {"covered", c.covered}});
    report["curve_coverage"] = cov;
    report["optimize"] = {{"min_sj_before", run.optimize.min_sj_before},
                          {"min_sj_after", run.optimize.min_sj_after},
                          {"low_cells_before", run.optimize.low_cells_before},
                          {"low_cells_after", run.optimize.low_cells_after},
                          {"surface_moves", run.optimize.surface_moves},
                          {"volume_moves", run.optimize.volume_moves},
                          {"unimprovable", run.optimize.unimprovable.size()}};
    json bind = json::array();
    for (size_t n = 0; n < run.binding.size(); ++n)
      if (run.binding[n].kind != EntityKind::kInterior)
        bind.push_back({n, std::string(entity_kind_name(run.binding[n].kind)), run.binding[n].id});
    report["binding"] = bind;
    std::printf("cells %zu nodes %zu min_sj %.4f conforming %s\n", run.mesh.cells.size(), run.mesh.nodes.size(),
                report["mesh"]["min_sj"].get<double>(), run.conformity.conforming() ? "yes" : "no");
    if (!run.conformity.conforming()) {
      stage = "validate";
      throw Error(ErrorCode::kNonConformalAssembly, "final mesh is not conformal");
    }
  });
}

int cmd_validate(const GlobalFlags& flags, const std::string& mesh_path, const std::string& library_path) {
  json report;
  fs::path out = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
  return with_report(out, "validate", report, [&](std::string& stage) {
    if (mesh_path.empty() && library_path.empty())
      throw Error(ErrorCode::kInvalidInput, "give --mesh and/or --library");
    if (!mesh_path.empty()) {
      stage = "read-mesh";
      Mesh m = read_vtk(mesh_path);
      m.check_references();
      stage = "conformity";
      ConformityReport r = validate_conformity(m);
      report["conformity"] = conformity_json(r);
      std::cout << r.summary();
      std::vector<double> q = cell_quality(m);
      int invalid = 0;
      for (double s : q) invalid += s <= 0;
      report["invalid_cells"] = invalid;
      if (!r.conforming()) throw Error(ErrorCode::kNonConformalAssembly, "mesh is not conformal");
      if (invalid) throw Error(ErrorCode::kDegenerateElement, std::to_string(invalid) + " cells with SJ <= 0");
    }
    if (!library_path.empty()) {
      stage = "library";
      PipelineConfig cfg = flags.config.empty() ? PipelineConfig{} : load_config(flags.config);
      NodeLayout layout = load_layout(cfg);
      std::ifstream is(library_path);
      if (!is) throw Error(ErrorCode::kIoError, "cannot read " + library_path);
      TemplateLibrary lib = read_library(is, layout, FacePatternTable(layout, cfg.library.style));
      report["library_cases"] = lib.entries.size();
      std::cout << "library ok: " << lib.entries.size() << " cases verified\n";
    }
  });
}

int cmd_stats(const GlobalFlags& flags, const std::string& mesh_path) {
  json report;
  fs::path out = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
  return with_report(out, "stats", report, [&](std::string& stage) {
    stage = "read-mesh";
    if (mesh_path.empty()) throw Error(ErrorCode::kInvalidInput, "give --mesh");
    Mesh m = read_vtk(mesh_path);
    stage = "stats";
    report["mesh"] = quality_json(m, SjNormalization{});
    std::cout << report["mesh"].dump(2) << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retrench: hex-dominant meshing by Super Element substitution"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.fallthrough();
  app.add_option("--config", flags.config, "YAML pipeline configuration")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "output directory (overrides the config)");
  app.add_option("--seed", flags.seed, "random seed (overrides the config)");
  app.add_option("--threads", flags.threads, "worker threads (overrides the config)");
  app.add_option("--budget-seconds", flags.budget_seconds, "solver budgets (overrides the config)");

  auto* portfolio = app.add_subcommand("portfolio", "enumerate the element portfolio and print its counts");
  auto* solve = app.add_subcommand("solve-cases", "solve every canonical case and write a template library");
  std::vector<int> cases;
  solve->add_option("--case", cases, "restrict to these case ids");
  app.add_subcommand("census", "list the canonical corner-mask cases");
  auto* mesh = app.add_subcommand("mesh", "run the meshing pipeline");
  auto* validate = app.add_subcommand("validate", "check a mesh file and/or a template library");
  std::string mesh_path, library_path;
  validate->add_option("--mesh", mesh_path, "VTK mesh");
  validate->add_option("--library", library_path, "template library");
  auto* stats = app.add_subcommand("stats", "quality and valence statistics of a mesh file");
  std::string stats_mesh;
  stats->add_option("--mesh", stats_mesh, "VTK mesh")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*portfolio) return cmd_portfolio(flags);
    if (*solve) return cmd_solve_cases(flags, cases);
    if (app.got_subcommand("census")) return cmd_census();
    if (*mesh) return cmd_mesh(flags);
    if (*validate) return cmd_validate(flags, mesh_path, library_path);
    if (*stats) return cmd_stats(flags, stats_mesh);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
