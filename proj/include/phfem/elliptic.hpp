#pragma once

#include "phfem/assembly.hpp"

namespace phfem {

/// Discrete solution of the saddle system: U holds 3 nodal values per
/// element (element-discontinuous P1), Lambda one constant per retained edge.
struct DiscreteSolution {
  Eigen::VectorXd primal;      // length N = 3 nE
  Eigen::VectorXd multiplier;  // length L
};

/// Assembles the saddle matrix [[B+D+M, -C'], [-C, 0]] of size (N+L)^2.
SparseMatrix build_saddle_matrix(const GlobalOperators& ops);

/// Stacks [F; bD] into the (N+L) right-hand side.
Eigen::VectorXd build_saddle_rhs(const Eigen::VectorXd& volume_and_neumann,
                                 const Eigen::VectorXd& dirichlet_data);

/// Solves the elliptic saddle-point system. The returned pair satisfies the
/// block system to the solver tolerance; in particular C U = -bD on every
/// retained edge.
DiscreteSolution solve_elliptic(const Mesh& mesh, const EdgeTopology& topology,
                                const EdgeClassification& classification,
                                const ProblemCoefficients& coeffs, const ScalarField& f,
                                const FluxField& flux, const ScalarField& u_D);

}  // namespace phfem
