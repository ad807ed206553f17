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

#include "retrench/assignment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <thread>
#include <unordered_map>

#include "retrench/error.hpp"

namespace retrench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_hexes(const Mesh& precursor) {
  for (const Cell& c : precursor.cells)
    if (c.kind != CellKind::kHex || c.nodes.size() != 8)
      throw Error(ErrorCode::kInvalidInput, "precursor cells must be hexahedra");
}

// Cells touching each node.
std::vector<std::vector<int32_t>> node_cells(const Mesh& m) {
  std::vector<std::vector<int32_t>> out(m.nodes.size());
  for (size_t c = 0; c < m.cells.size(); ++c)
    for (int32_t n : m.cells[c].nodes) out[n].push_back(static_cast<int32_t>(c));
  return out;
}

}  // namespace

Vec3 integration_point(int i) { return Vec3{(i % 5) / 4.0, (i / 5 % 5) / 4.0, (i / 25) / 4.0}; }

OccupancyTable occupancy_masks(const TemplateLibrary& library, const NodeLayout& layout) {
  OccupancyTable out;
  std::map<std::string, int> seen;
  for (int mask = 0; mask < 256; ++mask) {
    auto t = library.instantiate(static_cast<NodeMask>(mask), layout);
    if (!t) throw Error(ErrorCode::kInfeasible, "no template for mask " + mask_string(static_cast<NodeMask>(mask)));
    Occupancy occ;
    for (const Cell& c : t->cells) occ |= element_occupancy(layout, c.kind, c.nodes.data());
    auto [it, fresh] = seen.emplace(occ.to_string(), mask);
    if (!fresh)
      throw Error(ErrorCode::kNonDistinguishable, "masks " + mask_string(static_cast<NodeMask>(it->second)) + " and " +
                                                      mask_string(static_cast<NodeMask>(mask)) +
                                                      " have the same occupancy");
    out[mask] = occ;
  }
  return out;
}

ResidualScore residual(const Occupancy& se, const Occupancy& geo) {
  ResidualScore s;
  s.r_s = static_cast<int>((se & ~geo).count());
  s.r_p = static_cast<int>((geo & ~se).count());
  s.r = int64_t{s.r_s} * s.r_s + s.r_p;
  return s;
}

Vec3 trilinear(const Mesh& mesh, const Cell& hex, const Vec3& u) {
  // Hex vertex c sits at unit-cube corner (c&1 ^ c>>1&1, c>>1&1, c>>2).
  static constexpr int kx[8] = {0, 1, 1, 0, 0, 1, 1, 0}, ky[8] = {0, 0, 1, 1, 0, 0, 1, 1};
  Vec3 p{};
  for (int c = 0; c < 8; ++c) {
    double w = (kx[c] ? u.x : 1 - u.x) * (ky[c] ? u.y : 1 - u.y) * (c >= 4 ? u.z : 1 - u.z);
    p = p + mesh.nodes[hex.nodes[c]] * w;
  }
  return p;
}

std::vector<Occupancy> geometry_masks(const PrecursorMesh& precursor, const GeometryModel& model, int threads) {
  const Mesh& m = precursor.mesh;
  check_hexes(m);
  std::vector<Occupancy> out(m.cells.size());
  if (m.cells.empty() || model.triangles.empty()) return out;
  const double q = 1e-9 * std::max(m.bounds().diagonal(), 1e-300);
  struct Key {
    long long x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const noexcept {
      return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
    }
  };
  std::unordered_map<Key, int32_t, KeyHash> index;
  std::vector<Vec3> points;
  std::vector<int32_t> slot(m.cells.size() * 125);
  for (size_t c = 0; c < m.cells.size(); ++c)
    for (int i = 0; i < 125; ++i) {
      Vec3 p = trilinear(m, m.cells[c], integration_point(i));
      Key k{std::llround(p.x / q), std::llround(p.y / q), std::llround(p.z / q)};
      auto [it, fresh] = index.emplace(k, static_cast<int32_t>(points.size()));
      if (fresh) points.push_back(p);
      slot[c * 125 + i] = it->second;
    }
  std::vector<uint8_t> inside(points.size());
  threads = std::max(1, threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](int w) {
    try {
      for (size_t i = w; i < points.size(); i += threads) inside[i] = point_inside(model, points[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (size_t c = 0; c < m.cells.size(); ++c)
    for (int i = 0; i < 125; ++i)
      if (inside[slot[c * 125 + i]]) out[c].set(i);
  return out;
}

ResidualTable residual_table(const std::vector<Occupancy>& geo, const OccupancyTable& occupancy) {
  ResidualTable t(geo.size());
  for (size_t c = 0; c < geo.size(); ++c)
    for (int m = 0; m < 256; ++m) t[c][m] = residual(occupancy[m], geo[c]).r;
  return t;
}

uint8_t cell_mask(const Cell& hex, const PresenceVector& presence) {
  uint8_t m = 0;
  for (int c = 0; c < 8; ++c)
    if (presence[hex.nodes[c]]) m |= static_cast<uint8_t>(1u << c);
  return m;
}

int64_t assignment_objective(const Mesh& precursor, const ResidualTable& costs, const PresenceVector& presence) {
  int64_t sum = 0;
  for (size_t c = 0; c < precursor.cells.size(); ++c) sum += costs[c][cell_mask(precursor.cells[c], presence)];
  return sum;
}

// ---------------------------------------------------------------- exact

namespace {

// Lower bound of a cell over its completions, for every partial assignment
// coded in base 3 per corner (0 excluded, 1 kept, 2 open).
std::vector<int64_t> partial_bounds(const std::array<int64_t, 256>& cost) {
  constexpr int kStates = 6561;
  std::vector<int64_t> lb(kStates, INT64_MAX);
  static int pow3[9] = {1, 3, 9, 27, 81, 243, 729, 2187, 6561};
  // Visit states by increasing number of open corners.
  std::vector<std::vector<int>> by_open(9);
  for (int s = 0; s < kStates; ++s) {
    int open = 0;
    for (int c = 0, v = s; c < 8; ++c, v /= 3) open += v % 3 == 2;
    by_open[open].push_back(s);
  }
  for (int s : by_open[0]) {
    int mask = 0;
    for (int c = 0, v = s; c < 8; ++c, v /= 3)
      if (v % 3 == 1) mask |= 1 << c;
    lb[s] = cost[mask];
  }
  for (int k = 1; k <= 8; ++k)
    for (int s : by_open[k]) {
      int c = 0;
      for (int v = s; v % 3 != 2; v /= 3) ++c;
      int base = s - 2 * pow3[c];
      lb[s] = std::min(lb[base], lb[base + pow3[c]]);
    }
  return lb;
}

}  // namespace

AssignmentResult solve_exact(const Mesh& precursor, const ResidualTable& costs, const AssignmentOptions& opts) {
  check_hexes(precursor);
  if (precursor.cells.size() > opts.exact_cap)
    throw Error(ErrorCode::kBudgetExceeded, "precursor has " + std::to_string(precursor.cells.size()) +
                                                " cells, above the exact-solver cap of " +
                                                std::to_string(opts.exact_cap));
  auto t0 = Clock::now();
  const size_t ncell = precursor.cells.size();
  auto adj = node_cells(precursor);
  std::vector<int32_t> vars;
  for (size_t n = 0; n < adj.size(); ++n)
    if (!adj[n].empty()) vars.push_back(static_cast<int32_t>(n));

  std::vector<std::vector<int64_t>> lb(ncell);
  for (size_t c = 0; c < ncell; ++c) lb[c] = partial_bounds(costs[c]);
  // Local corner index of each node within each adjacent cell.
  std::vector<std::vector<std::pair<int32_t, int>>> uses(precursor.nodes.size());
  static const int pow3[8] = {1, 3, 9, 27, 81, 243, 729, 2187};
  for (size_t c = 0; c < ncell; ++c)
    for (int k = 0; k < 8; ++k) uses[precursor.cells[c].nodes[k]].push_back({static_cast<int32_t>(c), k});

  // Weak dominance, iterated to a fixpoint: when one value of a node is never
  // worse in any adjacent cell, for every completion consistent with nodes
  // fixed so far, flipping any optimum to that value keeps it optimal.
  std::vector<int> fixed(precursor.nodes.size(), -1);
  for (bool changed = true; changed;) {
    changed = false;
    for (int32_t n : vars) {
      if (fixed[n] >= 0) continue;
      bool drop_ok = true, keep_ok = true;
      for (auto [c, k] : uses[n]) {
        const Cell& cell = precursor.cells[c];
        int must = 0, known = 0;
        for (int j = 0; j < 8; ++j)
          if (fixed[cell.nodes[j]] >= 0) {
            known |= 1 << j;
            must |= fixed[cell.nodes[j]] << j;
          }
        for (int mask = 0; mask < 256 && (drop_ok || keep_ok); ++mask) {
          if ((mask >> k & 1) || (mask & known) != must) continue;
          int64_t off = costs[c][mask], on = costs[c][mask | 1 << k];
          drop_ok = drop_ok && off <= on;
          keep_ok = keep_ok && on <= off;
        }
        if (!drop_ok && !keep_ok) break;
      }
      if (drop_ok || keep_ok) {
        fixed[n] = drop_ok ? 0 : 1;
        changed = true;
      }
    }
  }

  std::vector<int> state(ncell, 6560);  // all open
  int64_t bound = 0;
  for (size_t c = 0; c < ncell; ++c) bound += lb[c][state[c]];

  AssignmentResult res;
  res.presence.assign(precursor.nodes.size(), 0);
  PresenceVector cur(precursor.nodes.size(), 0);
  // Seed the incumbent from the heuristic; ties with it are still explored
  // so the returned optimum does not depend on the seed.
  AssignmentResult seed = solve_heuristic(precursor, costs);
  int64_t best = seed.objective + 1;
  bool have = false, timed_out = false;
  uint64_t nodes = 0;

  std::vector<int> digit(precursor.nodes.size(), 2);
  auto set = [&](int32_t n, int v) {
    for (auto [c, k] : uses[n]) {
      bound -= lb[c][state[c]];
      state[c] += (v - digit[n]) * pow3[k];
      bound += lb[c][state[c]];
    }
    digit[n] = v;
  };
  std::vector<int32_t> open;
  for (int32_t n : vars) {
    if (fixed[n] < 0) {
      open.push_back(n);
    } else {
      set(n, fixed[n]);
      cur[n] = static_cast<uint8_t>(fixed[n]);
    }
  }
  vars = open;
  std::function<void(size_t)> dfs = [&](size_t i) {
    if (timed_out) return;
    if ((++nodes & 1023) == 0 && elapsed(t0) > opts.budget_seconds) {
      timed_out = true;
      return;
    }
    if (bound >= best) return;
    if (i == vars.size()) {
      best = bound;
      res.presence = cur;
      have = true;
      return;
    }
    int32_t n = vars[i];
    for (int v = 0; v < 2; ++v) {
      set(n, v);
      cur[n] = static_cast<uint8_t>(v);
      dfs(i + 1);
      set(n, 2);
      cur[n] = 0;
      if (timed_out) return;
    }
  };
  dfs(0);
  if (!have) res.presence = seed.presence;
  res.objective = assignment_objective(precursor, costs, res.presence);
  res.optimal = !timed_out;
  res.search_nodes = nodes;
  res.seconds = elapsed(t0);
  return res;
}

// ---------------------------------------------------------------- heuristic

AssignmentResult solve_heuristic(const Mesh& precursor, const ResidualTable& costs) {
  check_hexes(precursor);
  auto t0 = Clock::now();
  const size_t ncell = precursor.cells.size();
  const size_t nnode = precursor.nodes.size();
  std::vector<int> keep(nnode, 0), drop(nnode, 0);
  std::vector<uint8_t> preferred(ncell);
  for (size_t c = 0; c < ncell; ++c) {
    int bestm = 0;
    for (int m = 1; m < 256; ++m) {
      int64_t a = costs[c][m], b = costs[c][bestm];
      if (a < b || (a == b && std::popcount(static_cast<unsigned>(m)) < std::popcount(static_cast<unsigned>(bestm))))
        bestm = m;
    }
    preferred[c] = static_cast<uint8_t>(bestm);
    for (int k = 0; k < 8; ++k) ++((bestm >> k & 1) ? keep : drop)[precursor.cells[c].nodes[k]];
  }
  AssignmentResult res;
  res.presence.assign(nnode, 0);
  for (size_t n = 0; n < nnode; ++n) res.presence[n] = keep[n] > drop[n];

  // Repair: nodes next to a cell whose preferred mask was overruled take the
  // value that minimizes their adjacent cells' residual, excluding on ties.
  auto adj = node_cells(precursor);
  std::vector<uint8_t> flagged(nnode, 0);
  for (size_t c = 0; c < ncell; ++c)
    if (cell_mask(precursor.cells[c], res.presence) != preferred[c])
      for (int32_t n : precursor.cells[c].nodes) flagged[n] = 1;
  for (int sweep = 0; sweep < 16; ++sweep) {
    bool changed = false;
    std::vector<uint8_t> next(nnode, 0);
    for (size_t n = 0; n < nnode; ++n) {
      if (!flagged[n]) continue;
      int64_t cost[2];
      uint8_t old = res.presence[n];
      for (int v = 0; v < 2; ++v) {
        res.presence[n] = static_cast<uint8_t>(v);
        cost[v] = 0;
        for (int32_t c : adj[n]) cost[v] += costs[c][cell_mask(precursor.cells[c], res.presence)];
      }
      res.presence[n] = cost[1] < cost[0];
      if (res.presence[n] != old) {
        changed = true;
        for (int32_t c : adj[n])
          for (int32_t m : precursor.cells[c].nodes) next[m] = 1;
      }
    }
    if (!changed) break;
    flagged.swap(next);
  }
  res.objective = assignment_objective(precursor, costs, res.presence);
  res.seconds = elapsed(t0);
  return res;
}

// ---------------------------------------------------------------- assembly

Mesh assemble(const Mesh& precursor, const PresenceVector& presence, const TemplateLibrary& library,
              const NodeLayout& layout, bool check) {
  check_hexes(precursor);
  if (presence.size() != precursor.nodes.size())
    throw Error(ErrorCode::kInvalidInput, "presence vector length does not match the precursor");
  std::array<std::optional<SubdivisionTemplate>, 256> cache;
  std::array<bool, 256> loaded{};
  const int64_t S = layout.scale;
  Mesh out;
  std::map<std::vector<int64_t>, int32_t> index;
  for (const Cell& hex : precursor.cells) {
    uint8_t mask = cell_mask(hex, presence);
    if (!loaded[mask]) {
      cache[mask] = library.instantiate(mask, layout);
      loaded[mask] = true;
    }
    if (!cache[mask])
      throw Error(ErrorCode::kNonConformalAssembly, "no template for mask " + mask_string(mask));
    std::unordered_map<int32_t, int32_t> local;
    for (const Cell& tc : cache[mask]->cells) {
      Cell cell(tc.kind, {});
      for (int32_t l : tc.nodes) {
        auto it = local.find(l);
        if (it == local.end()) {
          // Key: precursor corners with nonzero integer trilinear weight.
          const IVec3& ip = layout.ipos[l];
          std::vector<std::pair<int64_t, int64_t>> w;
          static constexpr int kx[8] = {0, 1, 1, 0, 0, 1, 1, 0}, ky[8] = {0, 0, 1, 1, 0, 0, 1, 1};
          for (int c = 0; c < 8; ++c) {
            int64_t wc = (kx[c] ? ip.x : S - ip.x) * (ky[c] ? ip.y : S - ip.y) * (c >= 4 ? ip.z : S - ip.z);
            if (wc) w.push_back({hex.nodes[c], wc});
          }
          std::sort(w.begin(), w.end());
          std::vector<int64_t> key;
          for (auto [g, x] : w) {
            key.push_back(g);
            key.push_back(x);
          }
          auto [jt, fresh] = index.emplace(std::move(key), static_cast<int32_t>(out.nodes.size()));
          if (fresh) out.nodes.push_back(trilinear(precursor, hex, layout.positions[l]));
          it = local.emplace(l, jt->second).first;
        }
        cell.nodes.push_back(it->second);
      }
      out.cells.push_back(std::move(cell));
    }
  }
  if (check) {
    ConformityReport rep = validate_conformity(out);
    if (!rep.conforming()) throw Error(ErrorCode::kNonConformalAssembly, "assembled mesh: " + rep.summary());
  }
  return out;
}

std::string presence_string(const PresenceVector& presence) {
  std::string s;
  s.reserve(presence.size());
  for (uint8_t b : presence) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace retrench
