#pragma once

#include "phfem/assembly.hpp"

#include <string>
#include <vector>

namespace phfem {

/// Exact solution plus all derived data for a convergence study. The load,
/// trace and flux must be consistent with u; register_problem spot-checks
/// that numerically (finite differences at random points, tolerance 1e-6)
/// and throws on a mismatch.
struct ManufacturedProblem {
  std::string name;
  bool time_dependent = false;
  ProblemCoefficients coeffs;

  ScalarField u;                                          // exact solution
  std::function<Eigen::Vector2d(const Vec2&, double)> grad_u;
  ScalarField f;                                          // load
  ScalarField u_D;                                        // Dirichlet trace
  FluxField g;                                            // Neumann flux
  ScalarField u0;                                         // initial value
};

/// Registers a problem after running the consistency self-check:
///   grad_u == FD(u),  f == u_t - tr(A Hess u) + p.grad u + delta u,
///   u_D == u on the boundary,  g == (A grad u + u p) . nu.
void register_problem(ManufacturedProblem problem);

/// Looks up a registered problem by name; throws std::out_of_range with the
/// list of known names when absent. "elliptic-poly" and "parabolic-poly"
/// are built in.
const ManufacturedProblem& find_problem(const std::string& name);

std::vector<std::string> problem_names();

}  // namespace phfem
