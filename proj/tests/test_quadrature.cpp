#include "phfem/quadrature.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace phfem;
using namespace phfem::testing;

namespace {

// Exact integral of x^a y^b over the reference triangle {x,y>=0, x+y<=1}:
// a! b! / (a+b+2)!.
double reference_monomial(int a, int b) {
  double value = 1.0;
  for (int i = 1; i <= a; ++i) value *= i;
  for (int i = 1; i <= b; ++i) value *= i;
  for (int i = 1; i <= a + b + 2; ++i) value /= i;
  return value;
}

}  // namespace

TEST_CASE("default rule: positive weights summing to one") {
  const TriangleQuadrature& rule = TriangleQuadrature::default_rule();
  REQUIRE(rule.degree >= 5);
  double sum = 0.0;
  for (double w : rule.weights) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& p : rule.points) {
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));
    for (double b : p) CHECK(b >= 0.0);
  }
}

TEST_CASE("default rule integrates monomials up to its degree to 1e-14") {
  const TriangleQuadrature& rule = TriangleQuadrature::default_rule();
  const Vec2 v0(0, 0), v1(1, 0), v2(0, 1);
  for (int a = 0; a <= rule.degree; ++a)
    for (int b = 0; a + b <= rule.degree; ++b) {
      const double computed = rule.integrate(
          v0, v1, v2, [&](const Vec2& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
      const double exact = reference_monomial(a, b);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::abs(computed - exact) <= 1e-14);
    }
}

TEST_CASE("rule agrees with the independent oracle on a skewed triangle") {
  const TriangleQuadrature& rule = TriangleQuadrature::default_rule();
  const Vec2 v0(0.2, -0.1), v1(1.7, 0.4), v2(0.6, 1.3);
  auto f = [](const Vec2& x) {
    return 1.0 + x.x() - 2.0 * x.y() + x.x() * x.x() * x.y() + std::pow(x.y(), 4);
  };
  const double mine = rule.integrate(v0, v1, v2, f);
  const double oracle = oracle_integrate(v0, v1, v2, f);
  CHECK(mine == doctest::Approx(oracle).epsilon(1e-13));
}
