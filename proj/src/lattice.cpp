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

#include "retrench/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "retrench/error.hpp"

namespace retrench {

namespace {

constexpr IVec3 kCornerUnit[8] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Tet decompositions used for closed point containment.
constexpr uint8_t kPyramidTets[2][4] = {{0, 1, 2, 4}, {0, 2, 3, 4}};
constexpr uint8_t kPrismTets[3][4] = {{0, 1, 2, 5}, {0, 1, 5, 4}, {0, 4, 5, 3}};
constexpr uint8_t kHexTets[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                                    {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};

inline int64_t orient(const IVec3& a, const IVec3& b, const IVec3& c, const IVec3& d) {
  return triple(b - a, c - a, d - a);
}

bool in_closed_tet(const IVec3& a, const IVec3& b, const IVec3& c, const IVec3& d,
                   const IVec3& p) {
  int64_t v = orient(a, b, c, d);
  if (v == 0) return false;
  int64_t s[4] = {orient(p, b, c, d), orient(a, p, c, d), orient(a, b, p, d), orient(a, b, c, p)};
  for (int64_t x : s)
    if ((v > 0 && x < 0) || (v < 0 && x > 0)) return false;
  return true;
}

bool convex_polytope(CellKind kind, const IVec3* p) {
  int n = node_count(kind);
  for (const LocalFace& f : local_faces(kind)) {
    IVec3 normal;
    const IVec3& a = p[f.v[0]];
    if (f.size == 3) {
      normal = cross(p[f.v[1]] - a, p[f.v[2]] - a);
    } else {
      if (orient(a, p[f.v[1]], p[f.v[2]], p[f.v[3]]) != 0) return false;
      normal = cross(p[f.v[2]] - a, p[f.v[3]] - p[f.v[1]]);
    }
    for (int i = 0; i < n; ++i) {
      bool on_face = false;
      for (int j = 0; j < f.size; ++j) on_face |= (f.v[j] == i);
      if (on_face) {
        if (dot(normal, p[i] - a) != 0) return false;
      } else if (dot(normal, p[i] - a) >= 0) {
        return false;
      }
    }
  }
  return true;
}

double element_sj(const NodeLayout& layout, CellKind kind, const int32_t* nodes,
                  const SjNormalization& norm) {
  std::array<Vec3, 8> pts;
  int n = node_count(kind);
  for (int i = 0; i < n; ++i) pts[i] = layout.positions[nodes[i]];
  return scaled_jacobian(kind, std::span<const Vec3>(pts.data(), n), norm, 0.0);
}

struct Sink {
  std::vector<CandidateElement> kept;
  uint64_t raw = 0;
  uint64_t filtered = 0;
  bool keep_nonconvex = false;
};

void keep(Sink& sink, const NodeLayout& layout, const QualityConfig& cfg, CellKind kind,
          const int32_t* nodes) {
  ++sink.raw;
  double sj = element_sj(layout, kind, nodes, cfg.normalization);
  if (sj < cfg.threshold(kind)) return;
  ++sink.filtered;
  CandidateElement e;
  e.kind = kind;
  e.sj = sj;
  int n = node_count(kind);
  IVec3 p[8];
  for (int i = 0; i < n; ++i) {
    e.nodes[i] = static_cast<int8_t>(nodes[i]);
    p[i] = layout.ipos[nodes[i]];
  }
  e.convex = convex_polytope(kind, p);
  if (!e.convex && !sink.keep_nonconvex) return;
  e.occupancy = element_occupancy(layout, kind, nodes);
  sink.kept.push_back(e);
}

// Each enumerator visits every geometric element once with its canonical
// (lexicographically least) orientation-preserving vertex order: the first
// vertex is the smallest id, plus a kind-specific tie-break.

void enumerate_tets(const NodeLayout& L, const QualityConfig& cfg, int32_t v0, Sink& sink) {
  const auto& P = L.ipos;
  int32_t n = static_cast<int32_t>(L.size());
  for (int32_t b = v0 + 1; b < n; ++b)
    for (int32_t c = b + 1; c < n; ++c)
      for (int32_t d = c + 1; d < n; ++d) {
        int64_t o = orient(P[v0], P[b], P[c], P[d]);
        if (o == 0) continue;
        int32_t ids[4] = {v0, b, o > 0 ? c : d, o > 0 ? d : c};
        keep(sink, L, cfg, CellKind::kTet, ids);
      }
}

void enumerate_pyramids(const NodeLayout& L, const QualityConfig& cfg, int32_t v0, Sink& sink) {
  const auto& P = L.ipos;
  int32_t n = static_cast<int32_t>(L.size());
  for (int32_t v1 = v0 + 1; v1 < n; ++v1)
    for (int32_t v3 = v0 + 1; v3 < n; ++v3) {
      if (v3 == v1) continue;
      for (int32_t v4 = 0; v4 < n; ++v4) {
        if (v4 == v0 || v4 == v1 || v4 == v3) continue;
        if (orient(P[v0], P[v1], P[v3], P[v4]) <= 0) continue;
        for (int32_t v2 = v0 + 1; v2 < n; ++v2) {
          if (v2 == v1 || v2 == v3 || v2 == v4) continue;
          if (orient(P[v0], P[v1], P[v2], P[v3]) != 0) continue;
          if (triple(P[v2] - P[v1], P[v0] - P[v1], P[v4] - P[v1]) <= 0) continue;
          if (triple(P[v3] - P[v2], P[v1] - P[v2], P[v4] - P[v2]) <= 0) continue;
          if (triple(P[v0] - P[v3], P[v2] - P[v3], P[v4] - P[v3]) <= 0) continue;
          int32_t ids[5] = {v0, v1, v2, v3, v4};
          keep(sink, L, cfg, CellKind::kPyramid, ids);
        }
      }
    }
}

void enumerate_prisms(const NodeLayout& L, const QualityConfig& cfg, int32_t v0, Sink& sink) {
  const auto& P = L.ipos;
  int32_t n = static_cast<int32_t>(L.size());
  for (int32_t v1 = v0 + 1; v1 < n; ++v1)
    for (int32_t v2 = v0 + 1; v2 < n; ++v2) {
      if (v2 == v1) continue;
      IVec3 e01 = P[v1] - P[v0], e02 = P[v2] - P[v0];
      if (cross(e01, e02) == IVec3{}) continue;
      for (int32_t v3 = v0 + 1; v3 < n; ++v3) {
        if (v3 == v1 || v3 == v2) continue;
        if (triple(e01, e02, P[v3] - P[v0]) <= 0) continue;
        for (int32_t v4 = v0 + 1; v4 < n; ++v4) {
          if (v4 == v1 || v4 == v2 || v4 == v3) continue;
          if (triple(P[v2] - P[v1], P[v0] - P[v1], P[v4] - P[v1]) <= 0) continue;
          for (int32_t v5 = v0 + 1; v5 < n; ++v5) {
            if (v5 == v1 || v5 == v2 || v5 == v3 || v5 == v4) continue;
            if (triple(P[v0] - P[v2], P[v1] - P[v2], P[v5] - P[v2]) <= 0) continue;
            if (triple(P[v5] - P[v3], P[v4] - P[v3], P[v0] - P[v3]) <= 0) continue;
            if (triple(P[v3] - P[v4], P[v5] - P[v4], P[v1] - P[v4]) <= 0) continue;
            if (triple(P[v4] - P[v5], P[v3] - P[v5], P[v2] - P[v5]) <= 0) continue;
            int32_t ids[6] = {v0, v1, v2, v3, v4, v5};
            keep(sink, L, cfg, CellKind::kPrism, ids);
          }
        }
      }
    }
}

void enumerate_hexes(const NodeLayout& L, const QualityConfig& cfg, int32_t v0, Sink& sink) {
  const auto& P = L.ipos;
  int32_t n = static_cast<int32_t>(L.size());
  auto used = [](std::initializer_list<int32_t> s, int32_t v) {
    for (int32_t x : s)
      if (x == v) return true;
    return false;
  };
  for (int32_t v1 = v0 + 1; v1 < n; ++v1)
    for (int32_t v3 = v1 + 1; v3 < n; ++v3)
      for (int32_t v4 = v1 + 1; v4 < n; ++v4) {
        if (v4 == v3) continue;
        if (orient(P[v0], P[v1], P[v3], P[v4]) <= 0) continue;
        for (int32_t v2 = v0 + 1; v2 < n; ++v2) {
          if (used({v1, v3, v4}, v2)) continue;
          for (int32_t v5 = v0 + 1; v5 < n; ++v5) {
            if (used({v1, v2, v3, v4}, v5)) continue;
            if (triple(P[v2] - P[v1], P[v0] - P[v1], P[v5] - P[v1]) <= 0) continue;
            for (int32_t v7 = v0 + 1; v7 < n; ++v7) {
              if (used({v1, v2, v3, v4, v5}, v7)) continue;
              if (triple(P[v0] - P[v3], P[v2] - P[v3], P[v7] - P[v3]) <= 0) continue;
              if (triple(P[v7] - P[v4], P[v5] - P[v4], P[v0] - P[v4]) <= 0) continue;
              for (int32_t v6 = v0 + 1; v6 < n; ++v6) {
                if (used({v1, v2, v3, v4, v5, v7}, v6)) continue;
                if (triple(P[v3] - P[v2], P[v1] - P[v2], P[v6] - P[v2]) <= 0) continue;
                if (triple(P[v4] - P[v5], P[v6] - P[v5], P[v1] - P[v5]) <= 0) continue;
                if (triple(P[v5] - P[v6], P[v7] - P[v6], P[v2] - P[v6]) <= 0) continue;
                if (triple(P[v6] - P[v7], P[v4] - P[v7], P[v3] - P[v7]) <= 0) continue;
                int32_t ids[8] = {v0, v1, v2, v3, v4, v5, v6, v7};
                keep(sink, L, cfg, CellKind::kHex, ids);
              }
            }
          }
        }
      }
}

uint64_t fnv(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int32_t NodeLayout::find(const IVec3& p) const {
  for (size_t i = 0; i < ipos.size(); ++i)
    if (ipos[i] == p) return static_cast<int32_t>(i);
  return -1;
}

uint64_t NodeLayout::hash() const {
  uint64_t h = 1469598103934665603ull;
  h = fnv(h, static_cast<uint64_t>(scale));
  for (const IVec3& p : ipos) {
    h = fnv(h, static_cast<uint64_t>(p.x));
    h = fnv(h, static_cast<uint64_t>(p.y));
    h = fnv(h, static_cast<uint64_t>(p.z));
  }
  return h;
}

void NodeLayout::finalize() {
  if (positions.size() > 64) throw Error(ErrorCode::kInvalidInput, "layout has more than 64 nodes");
  scale = 0;
  for (int64_t d = 1; d <= 64 && scale == 0; ++d) {
    bool ok = true;
    for (const Vec3& p : positions)
      for (int i = 0; i < 3 && ok; ++i) {
        double s = p[i] * static_cast<double>(d);
        ok = std::fabs(s - std::round(s)) < 1e-9;
      }
    if (ok) scale = d;
  }
  if (scale == 0) throw Error(ErrorCode::kInvalidInput, "layout coordinates are not rational with denominator <= 64");
  ipos.clear();
  for (const Vec3& p : positions) {
    IVec3 q{std::llround(p.x * scale), std::llround(p.y * scale), std::llround(p.z * scale)};
    for (int i = 0; i < 3; ++i)
      if (q[i] < 0 || q[i] > scale) throw Error(ErrorCode::kInvalidInput, "layout node outside the unit cube");
    if (std::find(ipos.begin(), ipos.end(), q) != ipos.end())
      throw Error(ErrorCode::kInvalidInput, "layout repeats a position");
    ipos.push_back(q);
  }
  for (int c = 0; c < 8; ++c) {
    corner_ids[c] = find(kCornerUnit[c] * scale);
    if (corner_ids[c] < 0) throw Error(ErrorCode::kInvalidInput, "layout misses a cube corner");
  }
}

NodeLayout default_layout() {
  NodeLayout L;
  for (const IVec3& c : kCornerUnit)
    L.positions.push_back({double(c.x), double(c.y), double(c.z)});
  for (const auto& e : local_edges(CellKind::kHex))
    L.positions.push_back((L.positions[e[0]] + L.positions[e[1]]) * 0.5);
  for (const LocalFace& f : local_faces(CellKind::kHex)) {
    Vec3 c;
    for (int i = 0; i < 4; ++i) c += L.positions[f.v[i]];
    L.positions.push_back(c * 0.25);
  }
  L.positions.push_back({0.5, 0.5, 0.5});
  for (const IVec3& c : kCornerUnit)
    L.positions.push_back({0.25 + 0.5 * double(c.x), 0.25 + 0.5 * double(c.y), 0.25 + 0.5 * double(c.z)});
  L.finalize();
  return L;
}

NodeLayout restrict_layout(const NodeLayout& layout, const std::vector<int32_t>& keep) {
  NodeLayout L;
  for (int32_t id : keep) L.positions.push_back(layout.positions.at(id));
  L.finalize();
  return L;
}

NodeLayout read_layout(std::istream& is) {
  std::map<int32_t, Vec3> nodes;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int32_t id;
    Vec3 p;
    if (!(ls >> id)) continue;
    if (!(ls >> p.x >> p.y >> p.z))
      throw Error(ErrorCode::kParseError, "layout line " + std::to_string(lineno) + ": expected 'id x y z'");
    if (!nodes.emplace(id, p).second)
      throw Error(ErrorCode::kParseError, "layout repeats id " + std::to_string(id));
  }
  NodeLayout L;
  int32_t expect = 0;
  for (const auto& [id, p] : nodes) {
    if (id != expect++) throw Error(ErrorCode::kParseError, "layout ids must be 0..n-1");
    L.positions.push_back(p);
  }
  L.finalize();
  return L;
}

NodeLayout read_layout_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return read_layout(is);
}

void write_layout(std::ostream& os, const NodeLayout& layout) {
  os << "# id x y z\n";
  for (size_t i = 0; i < layout.size(); ++i) {
    const Vec3& p = layout.positions[i];
    os << i << ' ' << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << '\n';
  }
}

Cell CandidateElement::cell() const {
  Cell c{kind, std::vector<int32_t>(size())};
  for (int i = 0; i < size(); ++i) c.nodes[i] = nodes[i];
  return c;
}

std::vector<std::vector<int32_t>> faces_of(const CandidateElement& elem) {
  std::vector<std::vector<int32_t>> out;
  for (const LocalFace& f : local_faces(elem.kind)) {
    std::vector<int32_t> face;
    for (int i = 0; i < f.size; ++i) face.push_back(elem.nodes[f.v[i]]);
    out.push_back(std::move(face));
  }
  return out;
}

Occupancy element_occupancy(const NodeLayout& layout, CellKind kind, const int32_t* nodes) {
  // Common integer scale for lattice nodes and the quarter-spaced grid.
  int64_t s = std::lcm(layout.scale, int64_t{4});
  int64_t node_mul = s / layout.scale, grid_mul = s / 4;
  IVec3 p[8];
  int n = node_count(kind);
  for (int i = 0; i < n; ++i) p[i] = layout.ipos[nodes[i]] * node_mul;
  std::vector<std::array<uint8_t, 4>> tets;
  switch (kind) {
    case CellKind::kTet: tets.push_back({0, 1, 2, 3}); break;
    case CellKind::kPyramid:
      for (auto& t : kPyramidTets) tets.push_back({t[0], t[1], t[2], t[3]});
      break;
    case CellKind::kPrism:
      for (auto& t : kPrismTets) tets.push_back({t[0], t[1], t[2], t[3]});
      break;
    case CellKind::kHex:
      for (auto& t : kHexTets) tets.push_back({t[0], t[1], t[2], t[3]});
      break;
  }
  IVec3 lo = p[0], hi = p[0];
  for (int i = 1; i < n; ++i) {
    lo = {std::min(lo.x, p[i].x), std::min(lo.y, p[i].y), std::min(lo.z, p[i].z)};
    hi = {std::max(hi.x, p[i].x), std::max(hi.y, p[i].y), std::max(hi.z, p[i].z)};
  }
  Occupancy occ;
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) {
        IVec3 q{i * grid_mul, j * grid_mul, k * grid_mul};
        if (q.x < lo.x || q.y < lo.y || q.z < lo.z || q.x > hi.x || q.y > hi.y || q.z > hi.z) continue;
        for (const auto& t : tets)
          if (in_closed_tet(p[t[0]], p[t[1]], p[t[2]], p[t[3]], q)) {
            occ.set(i + 5 * j + 25 * k);
            break;
          }
      }
  return occ;
}

std::vector<const CandidateElement*> Portfolio::of_kind(CellKind kind) const {
  std::vector<const CandidateElement*> out;
  for (const auto& e : elements)
    if (e.kind == kind) out.push_back(&e);
  return out;
}

Portfolio enumerate_portfolio(const NodeLayout& layout, const QualityConfig& cfg,
                              const EnumerationOptions& opts) {
  cfg.validate();
  using Fn = void (*)(const NodeLayout&, const QualityConfig&, int32_t, Sink&);
  constexpr Fn fns[4] = {enumerate_tets, enumerate_pyramids, enumerate_prisms, enumerate_hexes};
  Portfolio out;
  out.layout_hash = layout.hash();
  out.config = cfg;
  int32_t n = static_cast<int32_t>(layout.size());
  int threads = std::max(1, opts.threads);
  for (int k = 0; k < 4; ++k) {
    if (!opts.kinds[k]) continue;
    std::vector<Sink> sinks(n);
    for (auto& s : sinks) s.keep_nonconvex = opts.keep_nonconvex;
    std::atomic<int32_t> next{0};
    auto work = [&] {
      for (int32_t v0; (v0 = next.fetch_add(1)) < n;) fns[k](layout, cfg, v0, sinks[v0]);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& s : sinks) {
      out.counts.raw[k] += s.raw;
      out.counts.filtered[k] += s.filtered;
      out.elements.insert(out.elements.end(), s.kept.begin(), s.kept.end());
    }
  }
  std::sort(out.elements.begin(), out.elements.end(), [](const CandidateElement& a, const CandidateElement& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.nodes < b.nodes;
  });
  return out;
}

std::string format_counts(const KindCounts& counts, const QualityConfig& cfg) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %16s %8s %12s\n", "kind", "raw(SJ>0)", "min_sj", "filtered");
  os << buf;
  for (CellKind k : {CellKind::kTet, CellKind::kHex, CellKind::kPrism, CellKind::kPyramid}) {
    int i = static_cast<int>(k);
    std::snprintf(buf, sizeof(buf), "%-10s %16llu %8.2f %12llu\n", std::string(kind_name(k)).c_str(),
                  static_cast<unsigned long long>(counts.raw[i]), cfg.threshold(k),
                  static_cast<unsigned long long>(counts.filtered[i]));
    os << buf;
  }
  return os.str();
}

namespace {
constexpr const char* kPortfolioMagic = "retrench-portfolio 1";
}  // namespace

void write_portfolio(std::ostream& os, const Portfolio& p) {
  os << kPortfolioMagic << '\n';
  os << "layout " << p.layout_hash << '\n';
  os << quality_signature(p.config) << '\n';
  os << "raw";
  for (auto c : p.counts.raw) os << ' ' << c;
  os << "\nfiltered";
  for (auto c : p.counts.filtered) os << ' ' << c;
  os << "\nelements " << p.elements.size() << '\n';
  for (const auto& e : p.elements) {
    os << kind_name(e.kind);
    for (int i = 0; i < e.size(); ++i) os << ' ' << int(e.nodes[i]);
    os << ' ' << fmt17(e.sj) << ' ' << (e.convex ? 1 : 0) << '\n';
  }
}

std::optional<Portfolio> read_portfolio(std::istream& is, const NodeLayout& layout,
                                        const QualityConfig& cfg) {
  std::string line;
  if (!std::getline(is, line) || line != kPortfolioMagic) return std::nullopt;
  Portfolio p;
  std::string word;
  is >> word >> p.layout_hash;
  if (word != "layout" || p.layout_hash != layout.hash()) return std::nullopt;
  std::getline(is, line);
  if (!std::getline(is, line) || line != quality_signature(cfg)) return std::nullopt;
  p.config = cfg;
  is >> word;
  for (auto& c : p.counts.raw) is >> c;
  is >> word;
  for (auto& c : p.counts.filtered) is >> c;
  size_t n;
  is >> word >> n;
  if (!is || word != "elements") throw Error(ErrorCode::kParseError, "corrupt portfolio cache");
  p.elements.resize(n);
  for (auto& e : p.elements) {
    is >> word;
    e.kind = parse_kind(word);
    int32_t ids[8];
    for (int i = 0; i < e.size(); ++i) {
      is >> ids[i];
      e.nodes[i] = static_cast<int8_t>(ids[i]);
    }
    int convex;
    is >> e.sj >> convex;
    e.convex = convex != 0;
    e.occupancy = element_occupancy(layout, e.kind, ids);
  }
  if (!is) throw Error(ErrorCode::kParseError, "truncated portfolio cache");
  return p;
}

}  // namespace retrench
