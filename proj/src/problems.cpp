#include "phfem/problems.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace phfem {

namespace {

std::map<std::string, ManufacturedProblem>& registry() {
  static std::map<std::string, ManufacturedProblem> problems;
  return problems;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

// Finite-difference consistency check of the supplied callbacks against the
// exact solution: gradient, load (non-divergence operator pairing
// u_t - tr(A Hess u) + p.grad u + delta u), trace and flux.
void self_check(const ManufacturedProblem& p) {
  std::mt19937 rng(0x9e3779b9);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const double eps = 1e-5;
  const double tol = 1e-6;

  auto check = [&](bool ok, const char* what) {
    if (!ok)
      throw std::runtime_error("register_problem('" + p.name + "'): " + what +
                               " is inconsistent with the exact solution");
  };

  for (int trial = 0; trial < 24; ++trial) {
    const Vec2 x(unit(rng), unit(rng));
    const double t = p.time_dependent ? unit(rng) : 0.0;

    const Eigen::Vector2d grad_fd(
        (p.u(Vec2(x.x() + eps, x.y()), t) - p.u(Vec2(x.x() - eps, x.y()), t)) / (2 * eps),
        (p.u(Vec2(x.x(), x.y() + eps), t) - p.u(Vec2(x.x(), x.y() - eps), t)) / (2 * eps));
    check((p.grad_u(x, t) - grad_fd).norm() < tol, "grad_u");

    const double u = p.u(x, t);
    const double uxx =
        (p.u(Vec2(x.x() + eps, x.y()), t) - 2 * u + p.u(Vec2(x.x() - eps, x.y()), t)) /
        (eps * eps);
    const double uyy =
        (p.u(Vec2(x.x(), x.y() + eps), t) - 2 * u + p.u(Vec2(x.x(), x.y() - eps), t)) /
        (eps * eps);
    const double uxy = (p.u(Vec2(x.x() + eps, x.y() + eps), t) -
                        p.u(Vec2(x.x() + eps, x.y() - eps), t) -
                        p.u(Vec2(x.x() - eps, x.y() + eps), t) +
                        p.u(Vec2(x.x() - eps, x.y() - eps), t)) /
                       (4 * eps * eps);
    const double ut = p.time_dependent
                          ? (p.u(x, t + eps) - p.u(x, t - eps)) / (2 * eps)
                          : 0.0;
    const auto& A = p.coeffs.A;
    const double lhs = ut - (A(0, 0) * uxx + 2 * A(0, 1) * uxy + A(1, 1) * uyy) +
                       p.coeffs.p.dot(p.grad_u(x, t)) + p.coeffs.delta * u;
    check(std::abs(lhs - p.f(x, t)) < tol * std::max(1.0, std::abs(p.f(x, t))), "f");

    // Boundary samples: trace on the bottom edge, flux through a random
    // unit normal.
    const Vec2 xb(unit(rng), 0.0);
    check(std::abs(p.u_D(xb, t) - p.u(xb, t)) < tol, "u_D");

    const double angle = 2 * std::numbers::pi * unit(rng);
    const Vec2 nu(std::cos(angle), std::sin(angle));
    const double flux = (A * p.grad_u(x, t) + u * p.coeffs.p).dot(nu);
    check(std::abs(p.g(x, nu, t) - flux) < tol * std::max(1.0, std::abs(flux)), "g");

    if (p.time_dependent)
      check(std::abs(p.u0(x, 0.0) - p.u(x, 0.0)) < tol, "u0");
  }
}

ManufacturedProblem make_elliptic_poly() {
  ManufacturedProblem p;
  p.name = "elliptic-poly";
  p.time_dependent = false;
  p.coeffs = ProblemCoefficients(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1.0, 1.0), 1.0);

  auto mu = [](double s) { return s - s * s; };    // s(1-s)
  auto dmu = [](double s) { return 1.0 - 2.0 * s; };

  p.u = [mu](const Vec2& x, double) { return mu(x.x()) * mu(x.y()); };
  p.grad_u = [mu, dmu](const Vec2& x, double) {
    return Eigen::Vector2d(dmu(x.x()) * mu(x.y()), mu(x.x()) * dmu(x.y()));
  };
  p.f = [mu, dmu](const Vec2& x, double) {
    return 2.0 * mu(x.y()) + 2.0 * mu(x.x()) + dmu(x.x()) * mu(x.y()) +
           mu(x.x()) * dmu(x.y()) + mu(x.x()) * mu(x.y());
  };
  p.u_D = [](const Vec2&, double) { return 0.0; };
  p.g = [mu, dmu](const Vec2& x, const Vec2& nu, double) {
    // (grad u + u p) . nu with p = (1,1) collapses to this vector field.
    const Eigen::Vector2d field((dmu(x.x()) + mu(x.x())) * mu(x.y()),
                                mu(x.x()) * (dmu(x.y()) + mu(x.y())));
    return field.dot(nu);
  };
  p.u0 = [](const Vec2&, double) { return 0.0; };
  return p;
}

ManufacturedProblem make_parabolic_poly() {
  ManufacturedProblem p;
  p.name = "parabolic-poly";
  p.time_dependent = true;
  p.coeffs = ProblemCoefficients(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1.0, 1.0), 1.0);

  auto mu = [](double s) { return s - s * s; };
  auto dmu = [](double s) { return 1.0 - 2.0 * s; };

  p.u = [mu](const Vec2& x, double t) { return t * mu(x.x()) * mu(x.y()); };
  p.grad_u = [mu, dmu](const Vec2& x, double t) {
    return Eigen::Vector2d(t * dmu(x.x()) * mu(x.y()), t * mu(x.x()) * dmu(x.y()));
  };
  p.f = [mu, dmu](const Vec2& x, double t) {
    return mu(x.x()) * mu(x.y()) + 2.0 * t * mu(x.y()) + 2.0 * t * mu(x.x()) +
           t * dmu(x.x()) * mu(x.y()) + t * mu(x.x()) * dmu(x.y()) +
           t * mu(x.x()) * mu(x.y());
  };
  p.u_D = [](const Vec2&, double) { return 0.0; };
  p.g = [mu, dmu](const Vec2& x, const Vec2& nu, double t) {
    const Eigen::Vector2d field(t * (dmu(x.x()) + mu(x.x())) * mu(x.y()),
                                t * mu(x.x()) * (dmu(x.y()) + mu(x.y())));
    return field.dot(nu);
  };
  p.u0 = [](const Vec2&, double) { return 0.0; };
  return p;
}

void ensure_builtins() {
  static std::once_flag once;
  std::call_once(once, [] {
    register_problem(make_elliptic_poly());
    register_problem(make_parabolic_poly());
  });
}

}  // namespace

void register_problem(ManufacturedProblem problem) {
  self_check(problem);
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[problem.name] = std::move(problem);
}

const ManufacturedProblem& find_problem(const std::string& name) {
  ensure_builtins();
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(name);
  if (it == registry().end()) {
    std::string known;
    for (const auto& [k, v] : registry()) known += (known.empty() ? "" : ", ") + k;
    throw std::out_of_range("unknown problem '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> problem_names() {
  ensure_builtins();
  std::lock_guard<std::mutex> lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

}  // namespace phfem
