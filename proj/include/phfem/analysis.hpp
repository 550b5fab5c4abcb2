#pragma once

#include "phfem/elliptic.hpp"
#include "phfem/parabolic.hpp"
#include "phfem/problems.hpp"
#include "phfem/quadrature.hpp"

namespace phfem {

/// Exact Lagrange multiplier (A grad u + u p) . nu at retained-edge
/// midpoints, nu taken as the t_plus outward normal (length L, ordered by
/// retained position).
Eigen::VectorXd exact_multiplier(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification,
                                 const ManufacturedProblem& problem, double time = 0.0);

/// Broken H1 seminorm of u - u_h (grad u_h constant per element).
double error_h1(const Mesh& mesh, const DiscreteSolution& solution,
                const ManufacturedProblem& problem, double time = 0.0);

/// L2 norm of u - u_h, u_h interpolated barycentrically from element DOFs.
double error_l2(const Mesh& mesh, const DiscreteSolution& solution,
                const ManufacturedProblem& problem, double time = 0.0);

/// Discrete dual-norm surrogate of the multiplier error:
///   max_i |((K - K_h)' C)_i| / sqrt(B_ii)  over DOFs with B_ii > 0.
/// Throws when every diagonal entry of B vanishes.
double error_multiplier(const Eigen::VectorXd& exact, const Eigen::VectorXd& discrete,
                        const SparseMatrix& constraint, const SparseMatrix& stiffness);

/// order_j = log(e_j / e_{j+1}) / log(h_j / h_{j+1}); throws on fewer than
/// two levels or non-positive entries.
std::vector<double> convergence_orders(const std::vector<double>& errors,
                                       const std::vector<double>& hs);

/// Midpoint traces of the hybrid primal solution, one value per edge taken
/// from the t_plus side (the constraint makes the two sides agree on
/// retained edges).
Eigen::VectorXd hybrid_midpoint_traces(const EdgeTopology& topology,
                                       const Eigen::VectorXd& primal);

/// One level of the parabolic convergence study.
struct ParabolicStudyRun {
  DiscreteSolution solution;
  double evaluation_time = 0.0;  // t_end + k, where the errors are measured
};

/// Runs the time stepper under the offset study convention that the
/// tabulated reference errors in the acceptance suite correspond to: step n
/// consumes load and boundary data from [n k, (n+1) k] while the state stays
/// indexed from t = 0, and the returned solution is compared against the
/// exact field at t_end + k. The observer sees the shifted per-step data
/// times (t_n + k).
ParabolicStudyRun run_parabolic_study(const Mesh& mesh, const EdgeTopology& topology,
                                      const EdgeClassification& classification,
                                      const ManufacturedProblem& problem,
                                      const TimeGrid& grid,
                                      const StepObserver& observer = nullptr);

/// Independent Crouzeix-Raviart discretization of the same problem: one
/// midpoint DOF per edge, Dirichlet DOFs pinned to u_D(m_E), identical load
/// and boundary quadratures. Returns the midpoint value of every edge, for
/// cross-checking the hybrid solution.
Eigen::VectorXd cr_reference_solve(const Mesh& mesh, const EdgeTopology& topology,
                                   const EdgeClassification& classification,
                                   const ProblemCoefficients& coeffs, const ScalarField& f,
                                   const FluxField& flux, const ScalarField& u_D,
                                   double time = 0.0);

}  // namespace phfem
