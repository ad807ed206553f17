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
#include <optional>
#include <string>
#include <vector>

#include "retrench/cell.hpp"
#include "retrench/lattice.hpp"
#include "retrench/symmetry.hpp"

namespace retrench {

enum class Objective { kMaxMinSJ, kMinElementCount, kMinMaxValence };

std::string_view objective_name(Objective o);
Objective parse_objective(std::string_view name);

/// Which surface conventions to use on cube faces.
enum class PatternStyle {
  /// Quadrant squares and corner triangles over corners, edge midpoints and
  /// the face center.
  kFull,
  /// Fans over corners and the face center only.
  kReduced,
};

/// Surface mesh fixed on one cube face for one retained-corner pattern.
struct FacePattern {
  /// Polygons over lattice ids, oriented outward from the cube.
  std::vector<std::vector<int32_t>> polygons;
  /// Every segment an element may place in this face: polygon sides plus
  /// extra lone segments.
  std::vector<std::array<int32_t, 2>> edges;
  /// Lattice ids an element may place in this face.
  std::vector<int32_t> nodes;
  /// Retained corners on this face.
  std::vector<int32_t> required;
};

class FacePatternTable {
 public:
  FacePatternTable(const NodeLayout& layout, PatternStyle style);

  PatternStyle style() const { return style_; }
  /// `bits` lists retained corners in the order of the hex face's vertices.
  const FacePattern& pattern(int face, unsigned bits) const { return table_[face][bits]; }
  /// Pattern of cube face `face` (hex local face order) under a corner mask.
  const FacePattern& for_mask(int face, NodeMask mask) const;

 private:
  PatternStyle style_;
  std::array<std::array<FacePattern, 16>, 6> table_;
};

struct SubdivisionProblem {
  NodeMask mask = 0;
  const NodeLayout* layout = nullptr;
  const Portfolio* portfolio = nullptr;
  const FacePatternTable* patterns = nullptr;
  Objective objective = Objective::kMaxMinSJ;
  /// Dual-graph edges are shared faces; false connects cells sharing a node.
  bool face_connectivity = true;
};

struct SolveOptions {
  double budget_seconds = 600;
  /// For open faces, try closing them as hull before adding elements.
  bool hull_first = false;
  /// MaxMinSJ only: extra time spent minimizing the element count among
  /// solutions at the optimal level. Does not affect the optimality flag.
  double tiebreak_seconds = 30;
};

struct SubdivisionTemplate {
  int case_id = 0;
  NodeMask mask = 0;
  std::vector<Cell> cells;
  double min_sj = 1.0;
  int max_valence = 0;
  Objective objective = Objective::kMaxMinSJ;
  bool optimal = false;

  int element_count() const { return static_cast<int>(cells.size()); }
};

struct SolveStats {
  double seconds = 0;
  uint64_t search_nodes = 0;
  int admissible = 0;
  int feasibility_runs = 0;
};

/// Exact search for a conformal convex subdivision of the cube matching the
/// face patterns of `mask`. Throws Infeasible when none exists and
/// BudgetExceeded when the budget ends before any solution was found; a
/// solution found before the deadline is returned with optimal = false.
SubdivisionTemplate solve(const SubdivisionProblem& problem, const SolveOptions& opts = {},
                          SolveStats* stats = nullptr);

/// Fills min_sj and max_valence from the cells.
void compute_template_stats(SubdivisionTemplate& t, const NodeLayout& layout,
                            const SjNormalization& norm = {});

struct ConstraintReport {
  bool face_matching = true;
  bool convex_hull = true;
  bool connected = true;
  bool non_intersecting = true;
  bool positive = true;
  std::vector<std::string> messages;

  bool ok() const { return face_matching && convex_hull && connected && non_intersecting && positive; }
};

/// Re-checks a template from its cells alone, without any solver state.
ConstraintReport verify_template(const SubdivisionTemplate& t, const NodeLayout& layout,
                                 const FacePatternTable& patterns, bool face_connectivity = true);

/// Template for the image mask t(template.mask), with lattice ids permuted.
SubdivisionTemplate apply_transform(const SubdivisionTemplate& tmpl, const CubeTransform& t,
                                    const NodeLayout& layout);

enum class CaseStatus { kSolved, kInfeasible, kUnsolved };

struct LibraryEntry {
  CanonicalCase canonical;
  CaseStatus status = CaseStatus::kUnsolved;
  SubdivisionTemplate tmpl;
  double seconds = 0;
};

struct TemplateLibrary {
  uint64_t layout_hash = 0;
  QualityConfig config;
  Objective objective = Objective::kMaxMinSJ;
  PatternStyle style = PatternStyle::kFull;
  /// One entry per case id, the empty case included.
  std::vector<LibraryEntry> entries;

  /// Template for any mask via its canonical case; nullopt if unsolved.
  std::optional<SubdivisionTemplate> instantiate(NodeMask mask, const NodeLayout& layout) const;
};

struct SolveAllOptions {
  SolveOptions solve;
  int threads = 1;
  /// Restrict to these case ids; empty means all.
  std::vector<int> cases;
};

TemplateLibrary solve_all_cases(const NodeLayout& layout, const Portfolio& portfolio,
                                const FacePatternTable& patterns, Objective objective,
                                const SolveAllOptions& opts = {});

void write_library(std::ostream& os, const TemplateLibrary& lib);
/// Parses a library and runs verify_template on every solved entry; throws
/// ParseError on malformed input and InvalidInput when a template fails.
TemplateLibrary read_library(std::istream& is, const NodeLayout& layout,
                             const FacePatternTable& patterns);

/// Reference statistics per row: orbit size, max valence, min SJ, elements.
struct ReferenceRow {
  int row;
  int orbit_size;
  int max_valence;
  double min_sj;
  int elements;
};
const std::vector<ReferenceRow>& reference_rows();

/// Pairs each case with a reference row. If the case orbit sizes follow the
/// reference rows in order, case i is row i. Otherwise rows and cases of
/// equal orbit size are both sorted by min SJ (descending) and paired in
/// order. Result indexed by case id; -1 for the empty case.
std::vector<int> match_reference_rows(const TemplateLibrary& lib);

/// Per-case table: case, mask, orbit size, valence, min SJ, elements, status,
/// and the matched reference row.
std::string format_case_report(const TemplateLibrary& lib);

}  // namespace retrench
