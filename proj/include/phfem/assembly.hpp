#pragma once

#include "phfem/edge_topology.hpp"
#include "phfem/mesh.hpp"
#include "phfem/sparse.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>

namespace phfem {

/// Scalar data sampled at a point and time (time is 0 for stationary data).
using ScalarField = std::function<double(const Vec2&, double)>;
/// Neumann datum as a flux of (point, outward unit normal, time), so both
/// scalar g problems and manufactured vector fields dotted with nu share
/// one interface.
using FluxField = std::function<double(const Vec2&, const Vec2&, double)>;

/// Constant coefficients of -div(A grad u + u p) + delta u (with the
/// convection term assembled in its non-divergence pairing, see LocalMatrices).
/// A must be symmetric positive definite; checked at construction.
struct ProblemCoefficients {
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double delta = 0.0;

  ProblemCoefficients() = default;
  ProblemCoefficients(const Eigen::Matrix2d& A_, const Eigen::Vector2d& p_, double delta_);
};

/// Element matrices for the P1 basis (barycentric coordinates lambda_i):
///   stiffness  B[i][j] = |T| (A grad lambda_i) . grad lambda_j
///   convection D[i][j] = (|T|/3) p . grad lambda_j
///   mass       M[i][j] = delta |T| (1/6 diagonal, 1/12 off-diagonal)
struct LocalMatrices {
  Eigen::Matrix3d stiffness;
  Eigen::Matrix3d convection;
  Eigen::Matrix3d mass;
};

/// Computes the local matrices; throws on a degenerate (area <= 0) triangle.
LocalMatrices local_element_matrices(const std::array<Vec2, 3>& vertices,
                                     const ProblemCoefficients& coeffs);

/// Row of the local constraint matrix: sign * length * R_k where
/// R_0 = [0, 1/2, 1/2], R_1 = [1/2, 0, 1/2], R_2 = [1/2, 1/2, 0]
/// (local_index is 0-based, the edge opposite that vertex).
Eigen::RowVector3d local_constraint_row(double edge_length, int sign, int local_index);

/// Global operators of the saddle system. Element m owns primal DOFs
/// 3m..3m+2; constraint rows are indexed by position in retained_edges.
/// `mass` is delta-scaled; `mass_unit` is the plain L2 mass needed by the
/// time stepper.
struct GlobalOperators {
  SparseMatrix stiffness;   // N x N
  SparseMatrix convection;  // N x N
  SparseMatrix mass;        // N x N, delta-scaled
  SparseMatrix mass_unit;   // N x N, no delta
  SparseMatrix constraint;  // L x N
  int primal_dofs = 0;      // N = 3 nE
  int multipliers = 0;      // L
};

/// Assembles the element-block operators B, D, M (and the unscaled mass);
/// the constraint matrix is left empty.
GlobalOperators assemble_volume_operators(const Mesh& mesh, const ProblemCoefficients& coeffs);

/// Assembles C alone: for every retained edge the row gets +|E| R_led at the
/// t_plus DOFs and, when interior, -|E| R_ledTN at the t_minus DOFs; Neumann
/// edges contribute no rows.
SparseMatrix assemble_constraint(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification);

/// Assembles B, D, M and C together.
GlobalOperators assemble_operators(const Mesh& mesh, const EdgeTopology& topology,
                                   const EdgeClassification& classification,
                                   const ProblemCoefficients& coeffs);

/// Volume load via the edge-midpoint rule: element contribution to DOF i is
/// (|T|/3) * (f(m_j) + f(m_k))/2 over the two edges adjacent to vertex i.
/// Throws on a non-finite sample (message carries the 1-based element id).
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f, double time = 0.0);

/// Neumann load: |E| g(m_E, nu) R_led scattered to the adjacent element.
Eigen::VectorXd assemble_neumann(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification,
                                 const FluxField& flux, double time = 0.0);

/// Dirichlet data vector (length L): -|E| u_D(m_E) at each Dirichlet edge's
/// retained position, zero at interior positions.
Eigen::VectorXd assemble_dirichlet(const Mesh& mesh, const EdgeTopology& topology,
                                   const EdgeClassification& classification,
                                   const ScalarField& u_D, double time = 0.0);

}  // namespace phfem
