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

#include "retrench/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "retrench/error.hpp"

namespace retrench {

namespace {

// Wedge numbering differs from ours: VTK's base triangle normal points away
// from the top face.
constexpr int kPrismToVtk[6] = {0, 2, 1, 3, 5, 4};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RawGrid {
  std::vector<Vec3> points;
  std::vector<std::vector<int32_t>> cells;
  std::vector<int> types;
};

RawGrid read_raw(std::istream& is) {
  RawGrid g;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# vtk DataFile", 0) != 0)
    throw Error(ErrorCode::kParseError, "missing VTK header");
  std::getline(is, line);  // title
  std::string word;
  is >> word;
  if (word != "ASCII") throw Error(ErrorCode::kParseError, "only ASCII VTK is supported");
  is >> word;
  std::string dataset;
  is >> dataset;
  if (word != "DATASET" || dataset != "UNSTRUCTURED_GRID")
    throw Error(ErrorCode::kParseError, "expected DATASET UNSTRUCTURED_GRID");
  while (is >> word) {
    if (word == "POINTS") {
      size_t n;
      std::string type;
      is >> n >> type;
      g.points.resize(n);
      for (auto& p : g.points) is >> p.x >> p.y >> p.z;
    } else if (word == "CELLS") {
      size_t n, total;
      is >> n >> total;
      g.cells.resize(n);
      for (auto& c : g.cells) {
        size_t k;
        is >> k;
        c.resize(k);
        for (auto& v : c) is >> v;
      }
    } else if (word == "CELL_TYPES") {
      size_t n;
      is >> n;
      g.types.resize(n);
      for (auto& t : g.types) is >> t;
    } else if (word == "CELL_DATA" || word == "POINT_DATA") {
      break;
    } else {
      throw Error(ErrorCode::kParseError, "unexpected VTK keyword '" + word + "'");
    }
    if (!is) throw Error(ErrorCode::kParseError, "truncated VTK section " + word);
  }
  if (g.types.size() != g.cells.size())
    throw Error(ErrorCode::kParseError, "CELLS and CELL_TYPES disagree");
  return g;
}

}  // namespace

void write_vtk(std::ostream& os, const Mesh& mesh, const std::vector<CellField>& fields,
               const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.nodes.size() << " double\n";
  for (const Vec3& p : mesh.nodes) os << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << '\n';
  size_t total = 0;
  for (const Cell& c : mesh.cells) total += c.nodes.size() + 1;
  os << "CELLS " << mesh.cells.size() << ' ' << total << '\n';
  for (const Cell& c : mesh.cells) {
    os << c.nodes.size();
    for (size_t i = 0; i < c.nodes.size(); ++i)
      os << ' ' << c.nodes[c.kind == CellKind::kPrism ? kPrismToVtk[i] : i];
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.cells.size() << '\n';
  for (const Cell& c : mesh.cells) os << vtk_cell_type(c.kind) << '\n';
  if (!fields.empty()) {
    os << "CELL_DATA " << mesh.cells.size() << '\n';
    for (const auto& f : fields) {
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) os << fmt17(v) << '\n';
    }
  }
}

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<CellField>& fields,
               const std::string& title) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  write_vtk(os, mesh, fields, title);
}

Mesh read_vtk(std::istream& is) {
  RawGrid g = read_raw(is);
  Mesh mesh;
  mesh.nodes = std::move(g.points);
  for (size_t i = 0; i < g.cells.size(); ++i) {
    CellKind kind;
    switch (g.types[i]) {
      case 10: kind = CellKind::kTet; break;
      case 14: kind = CellKind::kPyramid; break;
      case 13: kind = CellKind::kPrism; break;
      case 12: kind = CellKind::kHex; break;
      default:
        throw Error(ErrorCode::kParseError, "unsupported VTK cell type " + std::to_string(g.types[i]));
    }
    Cell c{kind, std::vector<int32_t>(g.cells[i].size())};
    if (static_cast<int>(c.nodes.size()) != node_count(kind))
      throw Error(ErrorCode::kParseError, "cell " + std::to_string(i) + " has wrong node count");
    for (size_t j = 0; j < c.nodes.size(); ++j)
      c.nodes[kind == CellKind::kPrism ? kPrismToVtk[j] : j] = g.cells[i][j];
    mesh.cells.push_back(std::move(c));
  }
  mesh.check_references();
  return mesh;
}

Mesh read_vtk(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return read_vtk(is);
}

QuadMesh read_vtk_quads(std::istream& is) {
  RawGrid g = read_raw(is);
  QuadMesh q;
  q.nodes = std::move(g.points);
  for (size_t i = 0; i < g.cells.size(); ++i) {
    if (g.types[i] != 9 || g.cells[i].size() != 4)
      throw Error(ErrorCode::kInvalidProfile,
                  "profile cell " + std::to_string(i) + " is not a quad (type " +
                      std::to_string(g.types[i]) + ")");
    q.quads.push_back({g.cells[i][0], g.cells[i][1], g.cells[i][2], g.cells[i][3]});
  }
  return q;
}

QuadMesh read_vtk_quads(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return read_vtk_quads(is);
}

void write_vtk_quads(std::ostream& os, const QuadMesh& mesh) {
  os << "# vtk DataFile Version 3.0\nprofile\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.nodes.size() << " double\n";
  for (const Vec3& p : mesh.nodes) os << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << '\n';
  os << "CELLS " << mesh.quads.size() << ' ' << mesh.quads.size() * 5 << '\n';
  for (const auto& q : mesh.quads) os << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
  os << "CELL_TYPES " << mesh.quads.size() << '\n';
  for (size_t i = 0; i < mesh.quads.size(); ++i) os << "9\n";
}

}  // namespace retrench
