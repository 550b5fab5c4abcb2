#pragma once

#include "phfem/elliptic.hpp"

#include <functional>
#include <optional>

namespace phfem {

/// Uniform time grid t_n = n k, n = 0..n_steps, with n_steps k = t_end.
struct TimeGrid {
  double t_end = 1.0;
  double k = 1.0;
  int n_steps = 1;

  /// Builds the grid from a final time and step size; throws when k does not
  /// divide t_end (up to rounding) or either is non-positive.
  static TimeGrid from_step(double t_end, double k);
};

/// Crank-Nicolson step matrices
///   M_pm = [[ M0 +- (k/2)(B + D + M),  -+(k/2) C' ],
///           [ -+(1/2) C,                0         ]]
/// where M0 is the unscaled mass; the multiplier rows carry 1/2, not k/2.
std::pair<SparseMatrix, SparseMatrix> step_matrices(const GlobalOperators& ops, double k);

/// Volume and Neumann loads evaluated at t_n = n k, with the same
/// quadratures as the stationary assembly.
std::pair<Eigen::VectorXd, Eigen::VectorXd> load_at_time(
    const Mesh& mesh, const EdgeTopology& topology,
    const EdgeClassification& classification, const ScalarField& f,
    const FluxField& flux, int n, double k);

/// Called after each step with (n, t_n, U^n, Lambda^n).
using StepObserver =
    std::function<void(int, double, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Crank-Nicolson time stepping of the parabolic saddle system.
///
/// W^0 comes from nodal interpolation of u0 (and the supplied initial
/// multiplier, zero when absent); step n solves
///   M_plus W^n = M_minus W^{n-1} + [ k (b^{n-1/2} + LN^{n-1/2}) ; bD^{n-1/2} ]
/// with midpoint data averaged from t_{n-1} and t_n. M_plus is factorized
/// once and reused. Returns the state at t_end; throws on factorization
/// failure or a non-finite state (blow-up, reported with the step index).
DiscreteSolution solve_parabolic(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification,
                                 const ProblemCoefficients& coeffs, const ScalarField& f,
                                 const FluxField& flux, const ScalarField& u_D,
                                 const ScalarField& u0, const TimeGrid& grid,
                                 const Eigen::VectorXd* initial_multiplier = nullptr,
                                 const StepObserver& observer = nullptr);

}  // namespace phfem
