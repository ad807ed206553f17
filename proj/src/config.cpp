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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "retrench/error.hpp"
#include "retrench/pipeline.hpp"

namespace retrench {

namespace {

Error bad(const std::string& what) { return Error(ErrorCode::kInvalidInput, "config: " + what); }

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) throw bad(where + " must be a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    std::string key = kv.first.as<std::string>();
    if (!ok.count(key)) throw bad("unknown key '" + key + "' in " + (where.empty() ? "top level" : where));
  }
}

template <class T>
void get(const YAML::Node& node, const char* key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw bad(std::string("bad value for '") + key + "': " + e.what());
  }
}

void get_vec(const YAML::Node& node, const char* key, Vec3& out) {
  if (!node || !node[key]) return;
  const YAML::Node v = node[key];
  if (!v.IsSequence() || v.size() != 3) throw bad(std::string("'") + key + "' must be a list of three numbers");
  try {
    out = {v[0].as<double>(), v[1].as<double>(), v[2].as<double>()};
  } catch (const YAML::Exception& e) {
    throw bad(std::string("bad value for '") + key + "': " + e.what());
  }
}

PatternStyle parse_style(const std::string& s) {
  if (s == "full") return PatternStyle::kFull;
  if (s == "reduced") return PatternStyle::kReduced;
  throw bad("patterns must be full or reduced");
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  if (!root || root.IsNull()) return cfg;
  check_keys(root, "", {"seed", "threads", "out", "geometry", "precursor", "library", "quality", "assignment", "optimize"});
  get(root, "seed", cfg.seed);
  get(root, "threads", cfg.threads);
  get(root, "out", cfg.out_dir);

  const YAML::Node g = root["geometry"];
  check_keys(g, "geometry", {"kind", "size", "radius", "axis", "lo", "hi", "stl", "entities", "tessellation"});
  get(g, "kind", cfg.geometry.kind);
  get_vec(g, "size", cfg.geometry.cylinder.size);
  get(g, "radius", cfg.geometry.cylinder.radius);
  get(g, "axis", cfg.geometry.cylinder.axis);
  get_vec(g, "lo", cfg.geometry.lo);
  get_vec(g, "hi", cfg.geometry.hi);
  get(g, "stl", cfg.geometry.stl);
  get(g, "entities", cfg.geometry.entities);
  get(g, "tessellation", cfg.geometry.tessellation);

  const YAML::Node p = root["precursor"];
  check_keys(p, "precursor", {"kind", "h", "margin", "max_cells", "profile", "step", "layers"});
  get(p, "kind", cfg.precursor.kind);
  get(p, "h", cfg.precursor.h);
  get(p, "margin", cfg.precursor.margin);
  get(p, "max_cells", cfg.precursor.max_cells);
  get(p, "profile", cfg.precursor.profile);
  get_vec(p, "step", cfg.precursor.step);
  get(p, "layers", cfg.precursor.layers);

  const YAML::Node l = root["library"];
  check_keys(l, "library", {"path", "solve", "objective", "patterns", "budget_seconds", "portfolio_cache", "layout"});
  get(l, "path", cfg.library.path);
  get(l, "solve", cfg.library.solve);
  if (l && l["objective"]) cfg.library.objective = parse_objective(l["objective"].as<std::string>());
  if (l && l["patterns"]) cfg.library.style = parse_style(l["patterns"].as<std::string>());
  get(l, "budget_seconds", cfg.library.budget_seconds);
  get(l, "portfolio_cache", cfg.library.portfolio_cache);
  get(l, "layout", cfg.library.layout);

  const YAML::Node q = root["quality"];
  check_keys(q, "quality", {"sj_min_tet", "sj_min_pyramid", "sj_min_prism", "sj_min_hex"});
  get(q, "sj_min_tet", cfg.quality.sj_min_tet);
  get(q, "sj_min_pyramid", cfg.quality.sj_min_pyramid);
  get(q, "sj_min_prism", cfg.quality.sj_min_prism);
  get(q, "sj_min_hex", cfg.quality.sj_min_hex);

  const YAML::Node a = root["assignment"];
  check_keys(a, "assignment", {"solver", "exact_cap", "budget_seconds"});
  get(a, "solver", cfg.assignment_solver);
  get(a, "exact_cap", cfg.assignment.exact_cap);
  get(a, "budget_seconds", cfg.assignment.budget_seconds);

  const YAML::Node o = root["optimize"];
  check_keys(o, "optimize", {"threshold", "max_iterations", "smoothing_sweeps"});
  get(o, "threshold", cfg.optimize.threshold);
  get(o, "max_iterations", cfg.optimize.max_iterations);
  get(o, "smoothing_sweeps", cfg.optimize.smoothing_sweeps);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), dir.empty() ? "." : dir);
}

std::string PipelineConfig::resolve(const std::string& path) const {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

void PipelineConfig::validate() const {
  auto need_file = [&](const std::string& what, const std::string& path) {
    if (path.empty()) throw bad(what + " is required");
    if (!std::filesystem::exists(resolve(path))) throw Error(ErrorCode::kIoError, what + " not found: " + resolve(path));
  };
  if (!(precursor.h > 0)) throw bad("precursor.h must be positive");
  if (!(library.budget_seconds > 0) || !(assignment.budget_seconds > 0)) throw bad("budgets must be positive");
  if (threads < 1) throw bad("threads must be at least 1");
  if (!(optimize.threshold <= 1)) throw bad("optimize.threshold must not exceed 1");
  if (optimize.max_iterations < 0 || optimize.smoothing_sweeps < 0) throw bad("iteration counts must not be negative");
  quality.validate();
  if (geometry.kind == "file") {
    need_file("geometry.stl", geometry.stl);
    if (!geometry.entities.empty()) need_file("geometry.entities", geometry.entities);
  } else if (geometry.kind != "box_minus_cylinder" && geometry.kind != "box" && geometry.kind != "empty") {
    throw bad("geometry.kind must be box_minus_cylinder, box, file or empty");
  }
  if (precursor.kind == "extrude") {
    need_file("precursor.profile", precursor.profile);
    if (precursor.layers < 1) throw bad("precursor.layers must be at least 1");
  } else if (precursor.kind != "box_grid") {
    throw bad("precursor.kind must be box_grid or extrude");
  }
  if (assignment_solver != "auto" && assignment_solver != "exact" && assignment_solver != "heuristic")
    throw bad("assignment.solver must be auto, exact or heuristic");
  if (!library.solve && !library.path.empty()) need_file("library.path", library.path);
  if (!library.layout.empty()) need_file("library.layout", library.layout);
}

}  // namespace retrench
