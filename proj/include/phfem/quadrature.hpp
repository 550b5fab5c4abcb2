#pragma once

#include "phfem/mesh.hpp"

#include <array>
#include <vector>

namespace phfem {

/// Symmetric-positive quadrature rule on the reference triangle, stored as
/// barycentric points with weights summing to 1 (scale by |T| on use).
///
/// The default rule collapses a 5x5 tensor Gauss-Legendre grid onto the
/// triangle (Duffy map); all weights are positive and the rule integrates
/// every bivariate monomial of total degree <= 8 exactly.
struct TriangleQuadrature {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;                // sum to 1
  int degree = 0;                             // polynomial exactness

  static const TriangleQuadrature& default_rule();

  /// Integral over the physical triangle (v0, v1, v2).
  template <typename F>
  double integrate(const Vec2& v0, const Vec2& v1, const Vec2& v2, F&& f) const {
    const double area = 0.5 * ((v1.x() - v0.x()) * (v2.y() - v0.y()) -
                               (v1.y() - v0.y()) * (v2.x() - v0.x()));
    double sum = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) {
      const auto& b = points[q];
      const Vec2 x = b[0] * v0 + b[1] * v1 + b[2] * v2;
      sum += weights[q] * f(x);
    }
    return area * sum;
  }
};

}  // namespace phfem
