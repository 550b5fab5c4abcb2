#include "phfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace phfem {

namespace {

// Splits a stream into rows of whitespace-separated tokens; blank lines are
// skipped so trailing newlines and empty boundary files parse cleanly.
std::vector<std::vector<std::string>> read_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (!tokens.empty()) rows.push_back(std::move(tokens));
  }
  return rows;
}

double parse_double(const std::string& tok, const char* what, std::size_t row) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || !std::isfinite(v))
    throw std::runtime_error(std::string(what) + ": row " + std::to_string(row + 1) +
                             ": not a finite number: '" + tok + "'");
  return v;
}

int parse_index(const std::string& tok, const char* what, std::size_t row, int node_count) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size())
    throw std::runtime_error(std::string(what) + ": row " + std::to_string(row + 1) +
                             ": not an index: '" + tok + "'");
  if (v < 1 || v > node_count)
    throw std::runtime_error(std::string(what) + ": row " + std::to_string(row + 1) +
                             ": node index " + std::to_string(v) + " out of range 1.." +
                             std::to_string(node_count));
  return static_cast<int>(v) - 1;  // to 0-based
}

std::vector<std::array<int, 2>> read_boundary(std::istream& in, const char* what,
                                              int node_count) {
  std::vector<std::array<int, 2>> pairs;
  const auto rows = read_rows(in);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 2)
      throw std::runtime_error(std::string(what) + ": row " + std::to_string(r + 1) +
                               ": expected 2 entries, got " + std::to_string(rows[r].size()));
    pairs.push_back({parse_index(rows[r][0], what, r, node_count),
                     parse_index(rows[r][1], what, r, node_count)});
  }
  return pairs;
}

// Directed pairs of an element's CCW cycle.
std::array<std::array<int, 2>, 3> element_cycle(const std::array<int, 3>& e) {
  return {{{e[0], e[1]}, {e[1], e[2]}, {e[2], e[0]}}};
}

// Normalizes a boundary pair to the direction it appears in some element
// cycle; returns false when neither direction does.
bool normalize_against_cycles(std::array<int, 2>& pair,
                              const std::set<std::array<int, 2>>& directed) {
  if (directed.count(pair)) return true;
  std::array<int, 2> flipped{pair[1], pair[0]};
  if (directed.count(flipped)) {
    pair = flipped;
    return true;
  }
  return false;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double element_area(const Mesh& mesh, int e) {
  const auto& t = mesh.elements[e];
  return 0.5 * signed_area2(mesh.coordinates[t[0]], mesh.coordinates[t[1]],
                            mesh.coordinates[t[2]]);
}

Mesh load_mesh(std::istream& coordinates, std::istream& elements, std::istream& dirichlet,
               std::istream& neumann) {
  Mesh mesh;

  const auto coord_rows = read_rows(coordinates);
  for (std::size_t r = 0; r < coord_rows.size(); ++r) {
    if (coord_rows[r].size() != 2)
      throw std::runtime_error("coordinates: row " + std::to_string(r + 1) +
                               ": expected 2 entries, got " +
                               std::to_string(coord_rows[r].size()));
    mesh.coordinates.emplace_back(parse_double(coord_rows[r][0], "coordinates", r),
                                  parse_double(coord_rows[r][1], "coordinates", r));
  }

  const int nc = mesh.node_count();
  const auto elem_rows = read_rows(elements);
  for (std::size_t r = 0; r < elem_rows.size(); ++r) {
    if (elem_rows[r].size() != 3)
      throw std::runtime_error("elements: row " + std::to_string(r + 1) +
                               ": expected 3 entries, got " +
                               std::to_string(elem_rows[r].size()));
    std::array<int, 3> t{parse_index(elem_rows[r][0], "elements", r, nc),
                         parse_index(elem_rows[r][1], "elements", r, nc),
                         parse_index(elem_rows[r][2], "elements", r, nc)};
    mesh.elements.push_back(t);
    if (!(element_area(mesh, static_cast<int>(r)) > 0.0))
      throw std::runtime_error("elements: element " + std::to_string(r + 1) +
                               " has non-positive signed area (not CCW)");
  }

  mesh.dirichlet_edges = read_boundary(dirichlet, "dirichlet", nc);
  mesh.neumann_edges = read_boundary(neumann, "neumann", nc);

  // Boundary pairs may be listed in either direction; store them CCW with
  // respect to the adjacent element when that element exists.
  std::set<std::array<int, 2>> directed;
  for (const auto& e : mesh.elements)
    for (const auto& d : element_cycle(e)) directed.insert(d);
  for (auto& pair : mesh.dirichlet_edges) normalize_against_cycles(pair, directed);
  for (auto& pair : mesh.neumann_edges) normalize_against_cycles(pair, directed);

  return mesh;
}

Mesh load_mesh_dir(const std::string& dir) {
  auto open = [&dir](const char* name, bool required) {
    std::ifstream f(dir + "/" + name);
    if (!f && required)
      throw std::runtime_error("cannot open " + dir + "/" + name);
    return f;
  };
  std::ifstream coords = open("coordinates.dat", true);
  std::ifstream elems = open("elements.dat", true);
  std::ifstream diri = open("dirichlet.dat", false);
  std::ifstream neum = open("neumann.dat", false);
  return load_mesh(coords, elems, diri, neum);
}

void save_mesh(const Mesh& mesh, std::ostream& coordinates, std::ostream& elements,
               std::ostream& dirichlet, std::ostream& neumann) {
  for (const auto& c : mesh.coordinates)
    coordinates << format_g17(c.x()) << ' ' << format_g17(c.y()) << '\n';
  for (const auto& e : mesh.elements)
    elements << e[0] + 1 << ' ' << e[1] + 1 << ' ' << e[2] + 1 << '\n';
  for (const auto& d : mesh.dirichlet_edges) dirichlet << d[0] + 1 << ' ' << d[1] + 1 << '\n';
  for (const auto& n : mesh.neumann_edges) neumann << n[0] + 1 << ' ' << n[1] + 1 << '\n';
}

void save_mesh_dir(const Mesh& mesh, const std::string& dir) {
  auto open = [&dir](const char* name) {
    std::ofstream f(dir + "/" + name);
    if (!f) throw std::runtime_error("cannot write " + dir + "/" + name);
    return f;
  };
  std::ofstream coords = open("coordinates.dat");
  std::ofstream elems = open("elements.dat");
  std::ofstream diri = open("dirichlet.dat");
  std::ofstream neum = open("neumann.dat");
  save_mesh(mesh, coords, elems, diri, neum);
}

double mesh_size(const Mesh& mesh) {
  if (mesh.elements.empty()) throw std::runtime_error("mesh_size: empty mesh");
  double h = 0.0;
  for (const auto& e : mesh.elements)
    for (const auto& d : element_cycle(e))
      h = std::max(h, (mesh.coordinates[d[1]] - mesh.coordinates[d[0]]).norm());
  return h;
}

MeshDiagnostics validate_mesh(const Mesh& mesh) {
  MeshDiagnostics diag;
  const int nc = mesh.node_count();

  auto in_range = [nc](int v) { return v >= 0 && v < nc; };

  for (std::size_t m = 0; m < mesh.elements.size(); ++m) {
    const auto& t = mesh.elements[m];
    bool ok = true;
    for (int v : t)
      if (!in_range(v)) {
        diag.violations.push_back("element " + std::to_string(m + 1) +
                                  ": node index out of range");
        ok = false;
      }
    if (ok && !(element_area(mesh, static_cast<int>(m)) > 0.0))
      diag.violations.push_back("element " + std::to_string(m + 1) +
                                ": non-positive signed area");
  }

  // Count undirected boundary edges of the triangulation (edges in exactly
  // one element cycle).
  std::map<std::array<int, 2>, int> edge_use;
  for (const auto& e : mesh.elements)
    for (auto d : element_cycle(e)) {
      if (d[0] > d[1]) std::swap(d[0], d[1]);
      ++edge_use[d];
    }

  auto check_pairs = [&](const std::vector<std::array<int, 2>>& pairs, const char* what) {
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      const auto& p = pairs[r];
      if (!in_range(p[0]) || !in_range(p[1])) {
        diag.violations.push_back(std::string(what) + " row " + std::to_string(r + 1) +
                                  ": node index out of range");
        continue;
      }
      std::array<int, 2> key{std::min(p[0], p[1]), std::max(p[0], p[1])};
      auto it = edge_use.find(key);
      if (it == edge_use.end())
        diag.violations.push_back(std::string(what) + " edge (" + std::to_string(p[0] + 1) +
                                  "," + std::to_string(p[1] + 1) + ") is not a mesh edge");
      else if (it->second != 1)
        diag.violations.push_back(std::string(what) + " edge (" + std::to_string(p[0] + 1) +
                                  "," + std::to_string(p[1] + 1) +
                                  ") is shared by more than one element");
    }
  };
  check_pairs(mesh.dirichlet_edges, "dirichlet");
  check_pairs(mesh.neumann_edges, "neumann");

  // Advisory coverage check: dirichlet and neumann must partition the set of
  // boundary edges (a pure-Dirichlet mesh with no neumann rows is fine).
  std::set<std::array<int, 2>> listed_d, listed_n;
  for (auto p : mesh.dirichlet_edges) {
    if (p[0] > p[1]) std::swap(p[0], p[1]);
    listed_d.insert(p);
  }
  for (auto p : mesh.neumann_edges) {
    if (p[0] > p[1]) std::swap(p[0], p[1]);
    if (listed_d.count(p))
      diag.violations.push_back("boundary edge (" + std::to_string(p[0] + 1) + "," +
                                std::to_string(p[1] + 1) +
                                ") listed as both dirichlet and neumann");
    listed_n.insert(p);
  }
  for (const auto& [key, uses] : edge_use)
    if (uses == 1 && !listed_d.count(key) && !listed_n.count(key))
      diag.violations.push_back("boundary edge (" + std::to_string(key[0] + 1) + "," +
                                std::to_string(key[1] + 1) +
                                ") is in neither boundary list");

  return diag;
}

}  // namespace phfem
