#pragma once

#include "phfem/mesh.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace phfem::testing {

/// The crisscross unit square: 5 nodes, 4 CCW elements around the center,
/// Dirichlet on the bottom/right sides, Neumann on the top/left.
inline Mesh unit_square_mesh() {
  Mesh mesh;
  mesh.coordinates = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1), Vec2(0.5, 0.5)};
  mesh.elements = {{4, 0, 1}, {4, 2, 0}, {4, 3, 2}, {4, 1, 3}};
  mesh.dirichlet_edges = {{0, 1}, {1, 3}};
  mesh.neumann_edges = {{3, 2}, {2, 0}};
  return mesh;
}

/// One CCW unit right triangle (0,0), (1,0), (0,1) with no boundary lists.
inline Mesh unit_right_triangle() {
  Mesh mesh;
  mesh.coordinates = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  mesh.elements = {{0, 1, 2}};
  return mesh;
}

/// Independent quadrature oracle: the classic 6-point symmetric triangle
/// rule, exact for polynomials of total degree 4. Barycentric points and
/// weights are hard-coded, unrelated to the library's rule construction.
template <typename F>
double oracle_integrate(const Vec2& v0, const Vec2& v1, const Vec2& v2, F&& f) {
  static const double a1 = 0.445948490915965;
  static const double w1 = 0.223381589678011;
  static const double a2 = 0.091576213509771;
  static const double w2 = 0.109951743655322;
  static const std::array<std::array<double, 4>, 6> rule = {{
      {a1, a1, 1 - 2 * a1, w1},
      {a1, 1 - 2 * a1, a1, w1},
      {1 - 2 * a1, a1, a1, w1},
      {a2, a2, 1 - 2 * a2, w2},
      {a2, 1 - 2 * a2, a2, w2},
      {1 - 2 * a2, a2, a2, w2},
  }};
  const double area = 0.5 * ((v1.x() - v0.x()) * (v2.y() - v0.y()) -
                             (v1.y() - v0.y()) * (v2.x() - v0.x()));
  double sum = 0.0;
  for (const auto& q : rule) {
    const Vec2 x = q[0] * v0 + q[1] * v1 + q[2] * v2;
    sum += q[3] * f(x);
  }
  return area * sum;
}

/// Two-point Gauss rule on the segment [a, b]; exact for cubics.
template <typename F>
double oracle_integrate_edge(const Vec2& a, const Vec2& b, F&& f) {
  const double s = 0.5 - 0.5 / std::sqrt(3.0);
  const Vec2 p0 = a + s * (b - a);
  const Vec2 p1 = a + (1.0 - s) * (b - a);
  return 0.5 * (b - a).norm() * (f(p0) + f(p1));
}

}  // namespace phfem::testing
