#include "phfem/quadrature.hpp"

#include <cmath>

namespace phfem {

namespace {

// 5-point Gauss-Legendre rule on [0, 1] (closed-form nodes).
struct Gauss1d {
  std::array<double, 5> x, w;
};

Gauss1d gauss5_unit() {
  const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  Gauss1d g;
  const double xs[5] = {-b, -a, 0.0, a, b};
  const double ws[5] = {wb, wa, 128.0 / 225.0, wa, wb};
  for (int i = 0; i < 5; ++i) {
    g.x[i] = 0.5 * (xs[i] + 1.0);
    g.w[i] = 0.5 * ws[i];
  }
  return g;
}

// Collapses the tensor rule onto the reference triangle through the map
// x = xi, y = eta (1 - xi), whose Jacobian (1 - xi) raises the xi-degree by
// one; 5 points per direction integrate total degree 8 exactly.
TriangleQuadrature build_duffy_rule() {
  const Gauss1d g = gauss5_unit();
  TriangleQuadrature rule;
  rule.degree = 8;
  rule.points.reserve(25);
  rule.weights.reserve(25);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double xi = g.x[i];
      const double eta = g.x[j];
      const double x = xi;
      const double y = eta * (1.0 - xi);
      // Barycentric w.r.t. vertices (0,0), (1,0), (0,1); weights are
      // normalized to sum to 1 (reference area 1/2 scaled out).
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * g.w[i] * g.w[j] * (1.0 - xi));
    }
  return rule;
}

}  // namespace

const TriangleQuadrature& TriangleQuadrature::default_rule() {
  static const TriangleQuadrature rule = build_duffy_rule();
  return rule;
}

}  // namespace phfem
