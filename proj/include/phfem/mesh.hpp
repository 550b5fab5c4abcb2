#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace phfem {

using Vec2 = Eigen::Vector2d;

/// Triangular mesh with a partitioned boundary.
///
/// Node indices are 0-based internally; the on-disk format (one whitespace
/// separated table per file: coordinates, elements, dirichlet, neumann) uses
/// 1-based indices. Elements are counter-clockwise node triples. Boundary
/// edges are node pairs listed counter-clockwise with respect to the single
/// element they belong to; the reader accepts reversed pairs and normalizes
/// them against the element cycles.
struct Mesh {
  std::vector<Vec2> coordinates;
  std::vector<std::array<int, 3>> elements;
  std::vector<std::array<int, 2>> dirichlet_edges;
  std::vector<std::array<int, 2>> neumann_edges;

  int node_count() const { return static_cast<int>(coordinates.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
};

/// Twice the signed area of triangle (a, b, c); positive for CCW order.
double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c);

/// Signed area of element `e`.
double element_area(const Mesh& mesh, int e);

/// Reads a mesh from four whitespace-separated tables.
///
/// Throws std::runtime_error on malformed rows, out-of-range indices or a
/// negative-area (non-CCW) element; messages carry 1-based row/element ids.
Mesh load_mesh(std::istream& coordinates, std::istream& elements,
               std::istream& dirichlet, std::istream& neumann);

/// Reads coordinates.dat, elements.dat, dirichlet.dat, neumann.dat from a
/// directory. Missing dirichlet/neumann files are treated as empty.
Mesh load_mesh_dir(const std::string& dir);

/// Writes the four tables (floats with 17 significant digits, 1-based
/// indices, boundary pairs CCW w.r.t. their adjacent element).
void save_mesh(const Mesh& mesh, std::ostream& coordinates,
               std::ostream& elements, std::ostream& dirichlet,
               std::ostream& neumann);

void save_mesh_dir(const Mesh& mesh, const std::string& dir);

/// h = maximum edge length over all element edges. Throws on an empty mesh.
double mesh_size(const Mesh& mesh);

/// Mesh invariant diagnostics; empty report means all invariants hold.
/// Boundary coverage problems are advisory findings, not load errors.
struct MeshDiagnostics {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

MeshDiagnostics validate_mesh(const Mesh& mesh);

}  // namespace phfem
