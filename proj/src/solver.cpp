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

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include "retrench/error.hpp"
#include "retrench/exact.hpp"
#include "retrench/subdivision.hpp"

namespace retrench {

namespace {

using Bits = std::vector<uint64_t>;

// Cube face (hex local order) for the plane coordinate `axis` = 0 or scale.
constexpr int kCubeFace[3][2] = {{5, 3}, {2, 4}, {0, 1}};

uint32_t face_key(const int32_t* ids, int n) {
  std::array<int32_t, 4> s{127, 127, 127, 127};
  std::copy(ids, ids + n, s.begin());
  std::sort(s.begin(), s.begin() + n);
  return (uint32_t(s[0]) << 21) | (uint32_t(s[1]) << 14) | (uint32_t(s[2]) << 7) | uint32_t(s[3]);
}

struct Elem {
  int32_t source = 0;
  CellKind kind = CellKind::kTet;
  int n = 0;
  std::array<int32_t, 8> nodes{};
  std::array<IVec3, 8> pos{};
  double sj = 0;
  int nfaces = 0;
  std::array<exact::Plane, 6> planes{};
  std::array<uint32_t, 6> keys{};
  std::array<uint64_t, 6> face_nodes{};
  std::array<int8_t, 6> pattern_face{};  // index into pattern faces, or -1
  uint64_t node_bits = 0;
  std::vector<uint64_t> edge_bits;
  IVec3 lo, hi;
};

struct Timeout {};

struct OpenFace {
  int elem;
  int local;
};

class CaseSearch {
 public:
  CaseSearch(const SubdivisionProblem& p, const SolveOptions& opts);

  const std::vector<Elem>& elems() const { return elems_; }
  uint64_t nodes_visited() const { return visited_; }

  /// Feasibility with every element SJ >= tau; fills `out` with element indices.
  bool feasible(double tau, std::vector<int>& out);
  /// Branch and bound for count or valence objectives.
  bool minimize(Objective obj, double tau, std::vector<int>& best, bool& complete);
  void set_budget(double seconds) {
    deadline_ = std::chrono::steady_clock::now() + std::chrono::microseconds(static_cast<int64_t>(seconds * 1e6));
  }

 private:
  struct State {
    std::vector<int> selected;
    std::vector<OpenFace> open;
    uint64_t covered = 0;  // pattern faces
    uint64_t nodes = 0;
    std::vector<std::pair<int, int>> links;
    std::vector<exact::Plane> hull;
    std::vector<int> edge_use;  // per node pair for valence
    int max_valence = 0;
  };

  const Bits& row(int e);
  const Bits& halfspace(const exact::Plane& p);
  bool compatible(const Elem& a, const Elem& b) const;
  bool connected(const State& s) const;
  bool inside(const State& s, const exact::Plane& p) const;
  int valence_after(const State& s, int e) const;
  void add(State& s, int e) const;
  void tick();

  // Returns true to stop the search.
  bool dfs(State& s, const Bits& allowed);

  const SubdivisionProblem& problem_;
  SolveOptions opts_;
  std::chrono::steady_clock::time_point deadline_;
  std::vector<Elem> elems_;
  size_t words_ = 0;
  int nodes_count_ = 0;
  std::vector<uint32_t> pattern_keys_;
  std::vector<std::vector<int>> pattern_elems_;
  std::vector<int32_t> required_;
  std::vector<Bits> node_elems_;
  std::unordered_map<uint32_t, std::vector<int>> by_face_;
  std::vector<Bits> rows_;
  std::vector<bool> have_row_;
  std::map<std::tuple<int64_t, int64_t, int64_t, int64_t>, Bits> halfspaces_;
  uint64_t visited_ = 0;

  // search mode
  bool minimizing_ = false;
  Objective objective_ = Objective::kMaxMinSJ;
  int bound_ = 0;
  std::vector<int> found_;
};

CaseSearch::CaseSearch(const SubdivisionProblem& p, const SolveOptions& opts)
    : problem_(p), opts_(opts) {
  const NodeLayout& L = *p.layout;
  nodes_count_ = static_cast<int>(L.size());
  deadline_ = std::chrono::steady_clock::now() +
              std::chrono::microseconds(static_cast<int64_t>(opts.budget_seconds * 1e6));

  // Pattern data per cube face.
  std::array<const FacePattern*, 6> pat;
  for (int f = 0; f < 6; ++f) pat[f] = &p.patterns->for_mask(f, p.mask);
  std::map<uint32_t, int> pattern_index;
  for (int f = 0; f < 6; ++f)
    for (const auto& poly : pat[f]->polygons) {
      uint32_t k = face_key(poly.data(), static_cast<int>(poly.size()));
      if (pattern_index.emplace(k, static_cast<int>(pattern_keys_.size())).second)
        pattern_keys_.push_back(k);
    }
  if (pattern_keys_.size() > 64) throw Error(ErrorCode::kInvalidInput, "too many pattern faces");
  for (int f = 0; f < 6; ++f)
    for (int32_t r : pat[f]->required)
      if (std::find(required_.begin(), required_.end(), r) == required_.end()) required_.push_back(r);

  auto planes_of = [&](const IVec3& q) {
    std::vector<int> out;
    for (int a = 0; a < 3; ++a) {
      if (q[a] == 0) out.push_back(kCubeFace[a][0]);
      if (q[a] == L.scale) out.push_back(kCubeFace[a][1]);
    }
    return out;
  };
  auto has_node = [](const FacePattern* fp, int32_t id) {
    return std::binary_search(fp->nodes.begin(), fp->nodes.end(), id);
  };
  auto has_edge = [](const FacePattern* fp, int32_t a, int32_t b) {
    std::array<int32_t, 2> e{std::min(a, b), std::max(a, b)};
    return std::binary_search(fp->edges.begin(), fp->edges.end(), e);
  };

  for (size_t i = 0; i < p.portfolio->elements.size(); ++i) {
    const CandidateElement& c = p.portfolio->elements[i];
    if (!c.convex) continue;
    Elem e;
    e.source = static_cast<int32_t>(i);
    e.kind = c.kind;
    e.n = c.size();
    e.sj = c.sj;
    bool ok = true;
    for (int v = 0; v < e.n && ok; ++v) {
      e.nodes[v] = c.nodes[v];
      e.pos[v] = L.ipos[e.nodes[v]];
      e.node_bits |= uint64_t{1} << e.nodes[v];
      for (int f : planes_of(e.pos[v])) ok &= has_node(pat[f], e.nodes[v]);
    }
    if (!ok) continue;
    for (const auto& ed : local_edges(e.kind)) {
      int32_t a = e.nodes[ed[0]], b = e.nodes[ed[1]];
      e.edge_bits.push_back((uint64_t(std::min(a, b)) << 32) | uint64_t(std::max(a, b)));
      for (int f : planes_of(e.pos[ed[0]])) {
        auto pb = planes_of(e.pos[ed[1]]);
        if (std::find(pb.begin(), pb.end(), f) != pb.end()) ok &= has_edge(pat[f], a, b);
      }
    }
    if (!ok) continue;
    auto faces = local_faces(e.kind);
    e.nfaces = static_cast<int>(faces.size());
    for (int lf = 0; lf < e.nfaces && ok; ++lf) {
      const LocalFace& F = faces[lf];
      int32_t ids[4];
      for (int k = 0; k < F.size; ++k) {
        ids[k] = e.nodes[F.v[k]];
        e.face_nodes[lf] |= uint64_t{1} << ids[k];
      }
      e.keys[lf] = face_key(ids, F.size);
      e.planes[lf] = exact::plane_through(e.pos[F.v[0]], e.pos[F.v[1]], e.pos[F.v[2]]);
      // A face on a cube plane must be a pattern polygon.
      std::vector<int> common = planes_of(e.pos[F.v[0]]);
      for (int k = 1; k < F.size; ++k) {
        auto pk = planes_of(e.pos[F.v[k]]);
        std::erase_if(common, [&](int f) { return std::find(pk.begin(), pk.end(), f) == pk.end(); });
      }
      e.pattern_face[lf] = -1;
      if (!common.empty()) {
        auto it = pattern_index.find(e.keys[lf]);
        if (it == pattern_index.end()) ok = false;
        else e.pattern_face[lf] = static_cast<int8_t>(it->second);
      }
    }
    if (!ok) continue;
    e.lo = e.hi = e.pos[0];
    for (int v = 1; v < e.n; ++v) {
      e.lo = {std::min(e.lo.x, e.pos[v].x), std::min(e.lo.y, e.pos[v].y), std::min(e.lo.z, e.pos[v].z)};
      e.hi = {std::max(e.hi.x, e.pos[v].x), std::max(e.hi.y, e.pos[v].y), std::max(e.hi.z, e.pos[v].z)};
    }
    elems_.push_back(std::move(e));
  }
  // Best quality first; stable on portfolio order.
  std::stable_sort(elems_.begin(), elems_.end(), [](const Elem& a, const Elem& b) { return a.sj > b.sj; });
  words_ = (elems_.size() + 63) / 64;
  pattern_elems_.assign(pattern_keys_.size(), {});
  node_elems_.assign(nodes_count_, Bits(words_, 0));
  for (size_t i = 0; i < elems_.size(); ++i) {
    const Elem& e = elems_[i];
    for (int lf = 0; lf < e.nfaces; ++lf) {
      by_face_[e.keys[lf]].push_back(static_cast<int>(i));
      if (e.pattern_face[lf] >= 0) pattern_elems_[e.pattern_face[lf]].push_back(static_cast<int>(i));
    }
    for (int v = 0; v < e.n; ++v) node_elems_[e.nodes[v]][i / 64] |= uint64_t{1} << (i % 64);
  }
  rows_.resize(elems_.size());
  have_row_.assign(elems_.size(), false);
}

bool CaseSearch::compatible(const Elem& A, const Elem& B) const {
  uint64_t shared = A.node_bits & B.node_bits;
  if (A.hi.x < B.lo.x || B.hi.x < A.lo.x || A.hi.y < B.lo.y || B.hi.y < A.lo.y || A.hi.z < B.lo.z ||
      B.hi.z < A.lo.z)
    return true;
  int ns = std::popcount(shared);
  IVec3 s_pts[2];
  exact::Plane s_plane;
  if (ns == 1 || ns == 2) {
    int k = 0;
    for (int v = 0; v < A.n; ++v)
      if ((shared >> A.nodes[v]) & 1u) s_pts[k++] = A.pos[v];
  }
  if (ns == 2) {
    auto has = [&](const Elem& E) {
      for (uint64_t e : E.edge_bits) {
        uint64_t a = e >> 32, b = e & 0xffffffffu;
        if (((shared >> a) & 1u) && ((shared >> b) & 1u)) return true;
      }
      return false;
    };
    if (!has(A) || !has(B)) return false;
  } else if (ns >= 3) {
    int fa = -1, fb = -1;
    for (int lf = 0; lf < A.nfaces; ++lf)
      if (A.face_nodes[lf] == shared) fa = lf;
    for (int lf = 0; lf < B.nfaces; ++lf)
      if (B.face_nodes[lf] == shared) fb = lf;
    if (fa < 0 || fb < 0) return false;
    s_plane = A.planes[fa];
  }
  std::array<exact::Plane, 12> P;
  int np = 0;
  for (int i = 0; i < A.nfaces; ++i) P[np++] = A.planes[i];
  for (int i = 0; i < B.nfaces; ++i) P[np++] = B.planes[i];
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) {
      IVec3 cij = cross(P[i].n, P[j].n);
      if (cij == IVec3{}) continue;
      for (int k = j + 1; k < np; ++k) {
        auto v = exact::intersect(P[i], P[j], P[k]);
        if (!v) continue;
        bool feasible = true;
        for (int m = 0; m < np && feasible; ++m) feasible = exact::side(P[m], *v) <= 0;
        if (!feasible) continue;
        switch (ns) {
          case 0: return false;
          case 1:
            if (!exact::equals(*v, s_pts[0])) return false;
            break;
          case 2:
            if (!exact::collinear(*v, s_pts[0], s_pts[1])) return false;
            break;
          default:
            if (exact::side(s_plane, *v) != 0) return false;
        }
      }
    }
  return true;
}

const Bits& CaseSearch::row(int e) {
  if (!have_row_[e]) {
    Bits r(words_, 0);
    for (size_t j = 0; j < elems_.size(); ++j)
      if (static_cast<int>(j) != e && compatible(elems_[e], elems_[j])) r[j / 64] |= uint64_t{1} << (j % 64);
    rows_[e] = std::move(r);
    have_row_[e] = true;
  }
  return rows_[e];
}

const Bits& CaseSearch::halfspace(const exact::Plane& p) {
  auto key = std::make_tuple(p.n.x, p.n.y, p.n.z, p.d);
  auto it = halfspaces_.find(key);
  if (it != halfspaces_.end()) return it->second;
  Bits b(words_, 0);
  for (size_t j = 0; j < elems_.size(); ++j) {
    bool in = true;
    for (int v = 0; v < elems_[j].n && in; ++v) in = exact::side(p, elems_[j].pos[v]) <= 0;
    if (in) b[j / 64] |= uint64_t{1} << (j % 64);
  }
  return halfspaces_.emplace(key, std::move(b)).first->second;
}

bool CaseSearch::inside(const State& s, const exact::Plane& p) const {
  for (int e : s.selected)
    for (int v = 0; v < elems_[e].n; ++v)
      if (exact::side(p, elems_[e].pos[v]) > 0) return false;
  return true;
}

bool CaseSearch::connected(const State& s) const {
  std::vector<int> parent(s.selected.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::unordered_map<int, int> pos;
  for (size_t i = 0; i < s.selected.size(); ++i) pos[s.selected[i]] = static_cast<int>(i);
  if (problem_.face_connectivity) {
    for (auto [a, b] : s.links) parent[find(pos[a])] = find(pos[b]);
  } else {
    for (size_t i = 0; i < s.selected.size(); ++i)
      for (size_t j = i + 1; j < s.selected.size(); ++j)
        if (elems_[s.selected[i]].node_bits & elems_[s.selected[j]].node_bits)
          parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  }
  for (size_t i = 1; i < parent.size(); ++i)
    if (find(static_cast<int>(i)) != find(0)) return false;
  return true;
}

int CaseSearch::valence_after(const State& s, int e) const {
  int best = s.max_valence;
  std::vector<int> extra(nodes_count_, 0);
  for (uint64_t ed : elems_[e].edge_bits) {
    int a = static_cast<int>(ed >> 32), b = static_cast<int>(ed & 0xffffffffu);
    if (s.edge_use[a * nodes_count_ + b] == 0) {
      best = std::max(best, s.edge_use[a * nodes_count_ + a] + ++extra[a]);
      best = std::max(best, s.edge_use[b * nodes_count_ + b] + ++extra[b]);
    }
  }
  return best;
}

void CaseSearch::add(State& s, int e) const {
  const Elem& E = elems_[e];
  s.selected.push_back(e);
  s.nodes |= E.node_bits;
  for (int lf = 0; lf < E.nfaces; ++lf) {
    if (E.pattern_face[lf] >= 0) {
      s.covered |= uint64_t{1} << E.pattern_face[lf];
      continue;
    }
    auto it = std::find_if(s.open.begin(), s.open.end(),
                           [&](const OpenFace& o) { return elems_[o.elem].keys[o.local] == E.keys[lf]; });
    if (it != s.open.end()) {
      s.links.emplace_back(it->elem, e);
      s.open.erase(it);
    } else {
      s.open.push_back({e, lf});
    }
  }
  if (!s.edge_use.empty()) {
    // diagonal entries hold node valences
    for (uint64_t ed : E.edge_bits) {
      int a = static_cast<int>(ed >> 32), b = static_cast<int>(ed & 0xffffffffu);
      if (s.edge_use[a * nodes_count_ + b]++ == 0) {
        s.max_valence = std::max(s.max_valence, ++s.edge_use[a * nodes_count_ + a]);
        s.max_valence = std::max(s.max_valence, ++s.edge_use[b * nodes_count_ + b]);
      }
    }
  }
}

void CaseSearch::tick() {
  if ((++visited_ & 255) == 0 && std::chrono::steady_clock::now() > deadline_) throw Timeout{};
}

bool CaseSearch::dfs(State& s, const Bits& allowed) {
  tick();
  auto is_allowed = [&](int j) { return (allowed[j / 64] >> (j % 64)) & 1u; };

  // Pick the demand with the fewest options.
  enum Kind { kPattern, kOpen, kNode } best_kind = kPattern;
  int best_index = -1;
  size_t best_count = SIZE_MAX;
  bool best_hull = false;
  for (size_t i = 0; i < pattern_keys_.size() && best_count > 0; ++i) {
    if ((s.covered >> i) & 1u) continue;
    size_t c = 0;
    for (int j : pattern_elems_[i]) c += is_allowed(j);
    if (c < best_count) best_count = c, best_kind = kPattern, best_index = static_cast<int>(i);
  }
  for (size_t i = 0; i < s.open.size() && best_count > 0; ++i) {
    const Elem& E = elems_[s.open[i].elem];
    size_t c = 0;
    auto it = by_face_.find(E.keys[s.open[i].local]);
    for (int j : it->second) c += is_allowed(j);
    bool hull = inside(s, E.planes[s.open[i].local]);
    c += hull;
    if (c < best_count) best_count = c, best_kind = kOpen, best_index = static_cast<int>(i), best_hull = hull;
  }
  for (size_t i = 0; i < required_.size() && best_count > 0; ++i) {
    if ((s.nodes >> required_[i]) & 1u) continue;
    size_t c = 0;
    for (size_t w = 0; w < words_; ++w) c += std::popcount(allowed[w] & node_elems_[required_[i]][w]);
    if (c < best_count) best_count = c, best_kind = kNode, best_index = static_cast<int>(i);
  }

  if (best_index < 0) {
    if (!connected(s)) return false;
    if (!minimizing_) {
      found_ = s.selected;
      return true;
    }
    int value = objective_ == Objective::kMinElementCount ? static_cast<int>(s.selected.size()) : s.max_valence;
    if (value < bound_) {
      bound_ = value;
      found_ = s.selected;
    }
    return false;
  }
  if (best_count == 0) return false;

  std::vector<int> options;
  if (best_kind == kPattern) {
    for (int j : pattern_elems_[best_index])
      if (is_allowed(j)) options.push_back(j);
  } else if (best_kind == kOpen) {
    const Elem& E = elems_[s.open[best_index].elem];
    for (int j : by_face_.at(E.keys[s.open[best_index].local]))
      if (is_allowed(j)) options.push_back(j);
  } else {
    const Bits& nb = node_elems_[required_[best_index]];
    for (size_t w = 0; w < words_; ++w)
      for (uint64_t m = allowed[w] & nb[w]; m; m &= m - 1)
        options.push_back(static_cast<int>(w * 64 + std::countr_zero(m)));
  }
  std::sort(options.begin(), options.end());

  auto try_hull = [&]() {
    OpenFace of = s.open[best_index];
    const exact::Plane& pl = elems_[of.elem].planes[of.local];
    const Bits& hs = halfspace(pl);
    Bits next(words_);
    for (size_t w = 0; w < words_; ++w) next[w] = allowed[w] & hs[w];
    State saved_open_state = s;
    s.open.erase(s.open.begin() + best_index);
    s.hull.push_back(pl);
    bool stop = dfs(s, next);
    s = std::move(saved_open_state);
    return stop;
  };

  if (best_kind == kOpen && best_hull && opts_.hull_first && try_hull()) return true;
  for (int j : options) {
    if (minimizing_) {
      if (objective_ == Objective::kMinElementCount && static_cast<int>(s.selected.size()) + 1 >= bound_) break;
      if (objective_ == Objective::kMinMaxValence && valence_after(s, j) >= bound_) continue;
    }
    const Bits& r = row(j);
    Bits next(words_);
    for (size_t w = 0; w < words_; ++w) next[w] = allowed[w] & r[w];
    State saved = s;
    add(s, j);
    bool stop = dfs(s, next);
    s = std::move(saved);
    if (stop) return true;
  }
  if (best_kind == kOpen && best_hull && !opts_.hull_first && try_hull()) return true;
  return false;
}

bool CaseSearch::feasible(double tau, std::vector<int>& out) {
  minimizing_ = false;
  Bits allowed(words_, 0);
  for (size_t j = 0; j < elems_.size(); ++j)
    if (elems_[j].sj >= tau) allowed[j / 64] |= uint64_t{1} << (j % 64);
  State s;
  found_.clear();
  if (!dfs(s, allowed)) return false;
  out = found_;
  return true;
}

bool CaseSearch::minimize(Objective obj, double tau, std::vector<int>& best, bool& complete) {
  minimizing_ = true;
  objective_ = obj;
  bound_ = best.empty() ? INT32_MAX : 0;
  if (!best.empty()) {
    State s;
    s.edge_use.assign(size_t(nodes_count_) * nodes_count_, 0);
    for (int e : best) add(s, e);
    bound_ = obj == Objective::kMinElementCount ? static_cast<int>(best.size()) : s.max_valence;
  }
  found_ = best;
  Bits allowed(words_, 0);
  for (size_t j = 0; j < elems_.size(); ++j)
    if (elems_[j].sj >= tau) allowed[j / 64] |= uint64_t{1} << (j % 64);
  State s;
  if (obj == Objective::kMinMaxValence) s.edge_use.assign(size_t(nodes_count_) * nodes_count_, 0);
  complete = true;
  try {
    dfs(s, allowed);
  } catch (const Timeout&) {
    complete = false;
  }
  best = found_;
  return !best.empty();
}

}  // namespace

SubdivisionTemplate solve(const SubdivisionProblem& problem, const SolveOptions& opts, SolveStats* stats) {
  if (!problem.layout || !problem.portfolio || !problem.patterns)
    throw Error(ErrorCode::kInvalidInput, "subdivision problem is incomplete");
  auto t0 = std::chrono::steady_clock::now();
  SubdivisionTemplate out;
  out.mask = problem.mask;
  out.case_id = canonicalize(problem.mask).first.case_id;
  out.objective = problem.objective;
  if (problem.mask == 0) {
    out.optimal = true;
    out.min_sj = 1.0;
    return out;
  }
  CaseSearch search(problem, opts);
  const auto& elems = search.elems();
  std::vector<int> best;
  bool complete = true;
  int runs = 0;
  auto finish = [&]() {
    if (stats) {
      stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      stats->search_nodes = search.nodes_visited();
      stats->admissible = static_cast<int>(elems.size());
      stats->feasibility_runs = runs;
    }
  };
  auto min_sj_of = [&](const std::vector<int>& sol) {
    double m = 1.0;
    for (int e : sol) m = std::min(m, elems[e].sj);
    return m;
  };

  try {
    ++runs;
    if (!search.feasible(-1.0, best)) {
      finish();
      throw Error(ErrorCode::kInfeasible, "no valid subdivision for mask " + mask_string(problem.mask));
    }
  } catch (const Timeout&) {
    finish();
    throw Error(ErrorCode::kBudgetExceeded, "no subdivision found within the budget");
  }

  if (problem.objective == Objective::kMaxMinSJ) {
    std::vector<double> levels;
    for (const auto& e : elems) levels.push_back(e.sj);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(), [](double a, double b) { return b - a < 1e-12; }),
                 levels.end());
    auto level_of = [&](double v) {
      return static_cast<int>(std::upper_bound(levels.begin(), levels.end(), v + 1e-12) - levels.begin()) - 1;
    };
    int lo = level_of(min_sj_of(best)), hi = static_cast<int>(levels.size()) - 1;
    try {
      while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        std::vector<int> sol;
        ++runs;
        if (search.feasible(levels[mid] - 1e-12, sol)) {
          best = sol;
          lo = std::max(mid, level_of(min_sj_of(sol)));
        } else {
          hi = mid - 1;
        }
      }
    } catch (const Timeout&) {
      complete = false;
    }
    if (opts.tiebreak_seconds > 0) {
      // Fewest elements among solutions at the optimal level.
      bool done;
      search.set_budget(opts.tiebreak_seconds);
      ++runs;
      search.minimize(Objective::kMinElementCount, min_sj_of(best) - 1e-12, best, done);
    }
  } else {
    ++runs;
    search.minimize(problem.objective, -1.0, best, complete);
  }

  for (int e : best) {
    const Elem& E = elems[e];
    out.cells.emplace_back(E.kind, std::vector<int32_t>(E.nodes.begin(), E.nodes.begin() + E.n));
  }
  std::sort(out.cells.begin(), out.cells.end());
  out.optimal = complete;
  compute_template_stats(out, *problem.layout, problem.portfolio->config.normalization);
  finish();
  return out;
}

}  // namespace retrench
