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


#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "retrench/error.hpp"
#include "retrench/symmetry.hpp"
#include "support.hpp"

using namespace retrench;
using retrench::test::layout;

namespace {

const FacePatternTable& full_patterns() {
  static const FacePatternTable t(layout(), PatternStyle::kFull);
  return t;
}

SubdivisionTemplate solve_case(int case_id, Objective obj = Objective::kMaxMinSJ) {
  SubdivisionProblem p{orbit_census()[case_id].representative, &layout(), &test::full_portfolio(), &full_patterns(), obj};
  return solve(p);
}

}  // namespace

TEST(FacePatterns, FullStyleBasics) {
  const FacePatternTable& t = full_patterns();
  EXPECT_TRUE(t.pattern(0, 0).polygons.empty());
  EXPECT_EQ(t.pattern(0, 0xF).polygons.size(), 4u);
  for (const auto& q : t.pattern(0, 0xF).polygons) EXPECT_EQ(q.size(), 4u);
  ASSERT_EQ(t.pattern(0, 0x1).polygons.size(), 1u);
  EXPECT_EQ(t.pattern(0, 0x1).polygons[0].size(), 3u);
  for (int f = 0; f < 6; ++f)
    for (unsigned bits = 0; bits < 16; ++bits) EXPECT_EQ(t.pattern(f, bits).required.size(), static_cast<size_t>(std::popcount(bits)));
}

TEST(FacePatterns, ForMaskMatchesFaceBits) {
  const FacePatternTable& t = full_patterns();
  for (int f = 0; f < 6; ++f) {
    EXPECT_TRUE(t.for_mask(f, 0).polygons.empty());
    EXPECT_EQ(t.for_mask(f, 0xFF).polygons.size(), 4u);
  }
}

TEST(Solve, EmptyMask) {
  SubdivisionTemplate t = solve_case(0);
  EXPECT_TRUE(t.cells.empty());
  EXPECT_TRUE(t.optimal);
}

TEST(Solve, FullCube) {
  SubdivisionTemplate t = solve_case(22);
  EXPECT_TRUE(t.optimal);
  EXPECT_EQ(t.element_count(), 8);
  EXPECT_NEAR(t.min_sj, 1.0, 1e-12);
  EXPECT_EQ(t.max_valence, 6);
  for (const Cell& c : t.cells) EXPECT_EQ(c.kind, CellKind::kHex);
  EXPECT_TRUE(verify_template(t, layout(), full_patterns()).ok());
}

TEST(Solve, HalfCube) {
  SubdivisionTemplate t = solve_case(5);
  EXPECT_EQ(t.mask, 0x0F);
  EXPECT_TRUE(t.optimal);
  EXPECT_EQ(t.element_count(), 4);
  EXPECT_NEAR(t.min_sj, 1.0, 1e-12);
}

TEST(Solve, AdjacentCornerPair) {
  SubdivisionTemplate t = solve_case(2);
  EXPECT_TRUE(t.optimal);
  EXPECT_EQ(t.element_count(), 2);
  // two right-isosceles prisms under the regular-element normalization
  EXPECT_NEAR(t.min_sj, std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(Solve, Deterministic) {
  SubdivisionTemplate a = solve_case(6), b = solve_case(6);
  EXPECT_EQ(a.cells, b.cells);
  EXPECT_EQ(a.min_sj, b.min_sj);
}

TEST(Solve, MinElementCountFullCube) {
  SubdivisionTemplate t = solve_case(22, Objective::kMinElementCount);
  EXPECT_LE(t.element_count(), 8);
  EXPECT_TRUE(verify_template(t, layout(), full_patterns()).ok());
  // the lone corner hex is not admissible: each full face is patterned as
  // four quadrant squares
  SubdivisionTemplate cube;
  cube.mask = 0xFF;
  std::vector<int32_t> n(layout().corner_ids.begin(), layout().corner_ids.end());
  cube.cells = {Cell(CellKind::kHex, n)};
  EXPECT_FALSE(verify_template(cube, layout(), full_patterns()).face_matching);
}

TEST(Solve, TinyBudget) {
  SubdivisionProblem p{orbit_census()[8].representative, &layout(), &test::full_portfolio(), &full_patterns()};
  SolveOptions o;
  o.budget_seconds = 1e-4;
  o.tiebreak_seconds = 0;
  try {
    SubdivisionTemplate t = solve(p, o);
    EXPECT_FALSE(t.optimal);
    EXPECT_TRUE(verify_template(t, layout(), full_patterns()).ok());
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(VerifyTemplate, ShippedLibrary) {
  const TemplateLibrary& lib = test::shipped_library();
  ASSERT_EQ(lib.entries.size(), 23u);
  for (const LibraryEntry& e : lib.entries) {
    EXPECT_EQ(e.status, CaseStatus::kSolved);
    ConstraintReport r = verify_template(e.tmpl, layout(), full_patterns());
    EXPECT_TRUE(r.ok()) << e.canonical.case_id;
  }
}

TEST(VerifyTemplate, DetectsDeletedAndDuplicatedCells) {
  for (const LibraryEntry& e : test::shipped_library().entries) {
    if (e.tmpl.cells.empty()) continue;
    int unmatched = 0;
    for (size_t k = 0; k < e.tmpl.cells.size(); ++k) {
      SubdivisionTemplate fewer = e.tmpl;
      fewer.cells.erase(fewer.cells.begin() + static_cast<std::ptrdiff_t>(k));
      ConstraintReport r = verify_template(fewer, layout(), full_patterns());
      EXPECT_FALSE(r.ok()) << e.canonical.case_id << " without cell " << k;
      unmatched += !r.face_matching;
    }
    EXPECT_GT(unmatched, 0) << e.canonical.case_id;
    SubdivisionTemplate more = e.tmpl;
    more.cells.push_back(more.cells.front());
    EXPECT_FALSE(verify_template(more, layout(), full_patterns()).face_matching) << e.canonical.case_id;
  }
}

TEST(Library, RoundTrip) {
  const TemplateLibrary& lib = test::shipped_library();
  std::stringstream ss;
  write_library(ss, lib);
  TemplateLibrary r = read_library(ss, layout(), full_patterns());
  ASSERT_EQ(r.entries.size(), lib.entries.size());
  for (size_t i = 0; i < lib.entries.size(); ++i) {
    EXPECT_EQ(r.entries[i].tmpl.cells, lib.entries[i].tmpl.cells);
    EXPECT_EQ(r.entries[i].tmpl.optimal, lib.entries[i].tmpl.optimal);
  }
}

TEST(Library, CorruptTemplateRejected) {
  std::stringstream ss;
  write_library(ss, test::shipped_library());
  std::string text = ss.str();
  // drop the last cell line of the file
  size_t end = text.find_last_not_of('\n');
  size_t start = text.rfind('\n', end);
  text.erase(start + 1);
  std::stringstream bad(text);
  EXPECT_THROW(read_library(bad, layout(), full_patterns()), Error);
}

TEST(Library, InstantiateEveryMask) {
  const TemplateLibrary& lib = test::shipped_library();
  for (int m = 0; m < 256; ++m) {
    auto t = lib.instantiate(static_cast<NodeMask>(m), layout());
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->mask, m);
    EXPECT_TRUE(verify_template(*t, layout(), full_patterns()).ok()) << m;
  }
}

TEST(Library, ReferenceRowsAlign) {
  std::vector<int> rows = match_reference_rows(test::shipped_library());
  for (size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i], static_cast<int>(i));
  EXPECT_EQ(reference_rows().size(), 22u);
}

TEST(Oracle, ReducedPortfolioMaxMinSj) {
  NodeLayout reduced = test::corners_and_face_centers(layout());
  ASSERT_EQ(reduced.size(), 14u);
  Portfolio p = enumerate_portfolio(reduced, QualityConfig{});
  FacePatternTable patterns(reduced, PatternStyle::kReduced);
  for (int id : {7, 10, 12}) {
    NodeMask mask = orbit_census()[id].representative;
    SubdivisionProblem prob{mask, &reduced, &p, &patterns, Objective::kMaxMinSJ};
    SubdivisionTemplate t = solve(prob);
    test::TilingOracleResult o = test::tiling_oracle(mask, reduced, p, patterns);
    EXPECT_TRUE(t.optimal);
    EXPECT_GT(o.admissible, 0);
    EXPECT_DOUBLE_EQ(t.min_sj, o.best_min_sj) << id;
  }
}

TEST(Oracle, ReducedInfeasibleCase) {
  NodeLayout reduced = test::corners_and_face_centers(layout());
  Portfolio p = enumerate_portfolio(reduced, QualityConfig{});
  FacePatternTable patterns(reduced, PatternStyle::kReduced);
  SubdivisionProblem prob{orbit_census()[1].representative, &reduced, &p, &patterns, Objective::kMaxMinSJ};
  try {
    solve(prob);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
  EXPECT_EQ(test::tiling_oracle(orbit_census()[1].representative, reduced, p, patterns).admissible, 0);
}
