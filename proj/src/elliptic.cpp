#include "phfem/elliptic.hpp"

#include <stdexcept>

namespace phfem {

namespace {

// Appends every stored entry of `m`, scaled and shifted, to `buf`.
void append_block(TripletBuffer& buf, const Eigen::SparseMatrix<double>& m, int row_offset,
                  int col_offset, double scale, bool transpose = false) {
  for (int j = 0; j < m.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
      const int r = transpose ? static_cast<int>(it.col()) : static_cast<int>(it.row());
      const int c = transpose ? static_cast<int>(it.row()) : static_cast<int>(it.col());
      buf.add(row_offset + r, col_offset + c, scale * it.value());
    }
}

}  // namespace

SparseMatrix build_saddle_matrix(const GlobalOperators& ops) {
  const int n = ops.primal_dofs;
  const int l = ops.multipliers;
  TripletBuffer buf(n + l, n + l);
  buf.reserve(static_cast<std::size_t>(ops.stiffness.nonzeros()) +
              2 * static_cast<std::size_t>(ops.constraint.nonzeros()));

  const Eigen::SparseMatrix<double> k =
      ops.stiffness.eigen() + ops.convection.eigen() + ops.mass.eigen();
  append_block(buf, k, 0, 0, 1.0);
  append_block(buf, ops.constraint.eigen(), 0, n, -1.0, /*transpose=*/true);
  append_block(buf, ops.constraint.eigen(), n, 0, -1.0);

  return SparseMatrix::from_triplets(buf);
}

Eigen::VectorXd build_saddle_rhs(const Eigen::VectorXd& volume_and_neumann,
                                 const Eigen::VectorXd& dirichlet_data) {
  Eigen::VectorXd rhs(volume_and_neumann.size() + dirichlet_data.size());
  rhs << volume_and_neumann, dirichlet_data;
  return rhs;
}

DiscreteSolution solve_elliptic(const Mesh& mesh, const EdgeTopology& topology,
                                const EdgeClassification& classification,
                                const ProblemCoefficients& coeffs, const ScalarField& f,
                                const FluxField& flux, const ScalarField& u_D) {
  if (classification.dirichlet_edge_ids.empty() && coeffs.delta <= 0.0)
    throw SolverError(
        "solve_elliptic: no Dirichlet edge and delta <= 0, the system is singular");

  const GlobalOperators ops = assemble_operators(mesh, topology, classification, coeffs);
  const Eigen::VectorXd load = assemble_load(mesh, f) +
                               assemble_neumann(mesh, topology, classification, flux);
  const Eigen::VectorXd bd = assemble_dirichlet(mesh, topology, classification, u_D);

  const SparseMatrix system = build_saddle_matrix(ops);
  const Eigen::VectorXd x = solve_sparse(system, build_saddle_rhs(load, bd));

  DiscreteSolution sol;
  sol.primal = x.head(ops.primal_dofs);
  sol.multiplier = x.tail(ops.multipliers);
  return sol;
}

}  // namespace phfem
