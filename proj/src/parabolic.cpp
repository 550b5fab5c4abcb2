#include "phfem/parabolic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phfem {

namespace {

void append_block(TripletBuffer& buf, const Eigen::SparseMatrix<double>& m, int row_offset,
                  int col_offset, double scale, bool transpose = false) {
  for (int j = 0; j < m.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
      const int r = transpose ? static_cast<int>(it.col()) : static_cast<int>(it.row());
      const int c = transpose ? static_cast<int>(it.row()) : static_cast<int>(it.col());
      buf.add(row_offset + r, col_offset + c, scale * it.value());
    }
}

SparseMatrix step_matrix(const GlobalOperators& ops, double k, double sign) {
  const int n = ops.primal_dofs;
  const int l = ops.multipliers;
  const Eigen::SparseMatrix<double> top =
      ops.mass_unit.eigen() +
      sign * (k / 2.0) *
          (ops.stiffness.eigen() + ops.convection.eigen() + ops.mass.eigen());
  TripletBuffer buf(n + l, n + l);
  buf.reserve(static_cast<std::size_t>(top.nonZeros()) +
              2 * static_cast<std::size_t>(ops.constraint.nonzeros()));
  append_block(buf, top, 0, 0, 1.0);
  // The multiplier coupling carries k/2 in the primal rows but only 1/2 in
  // the constraint rows.
  append_block(buf, ops.constraint.eigen(), 0, n, -sign * (k / 2.0), /*transpose=*/true);
  append_block(buf, ops.constraint.eigen(), n, 0, -sign * 0.5);
  return SparseMatrix::from_triplets(buf);
}

}  // namespace

TimeGrid TimeGrid::from_step(double t_end, double k) {
  if (!(t_end > 0.0) || !(k > 0.0))
    throw std::invalid_argument("TimeGrid: t_end and k must be positive");
  const double ratio = t_end / k;
  const int n = static_cast<int>(std::llround(ratio));
  if (n < 1 || std::abs(n * k - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("TimeGrid: k does not divide t_end");
  return TimeGrid{t_end, k, n};
}

std::pair<SparseMatrix, SparseMatrix> step_matrices(const GlobalOperators& ops, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("step_matrices: k must be positive");
  return {step_matrix(ops, k, +1.0), step_matrix(ops, k, -1.0)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> load_at_time(
    const Mesh& mesh, const EdgeTopology& topology,
    const EdgeClassification& classification, const ScalarField& f, const FluxField& flux,
    int n, double k) {
  if (n < 0) throw std::invalid_argument("load_at_time: negative step index");
  const double t = n * k;
  return {assemble_load(mesh, f, t),
          assemble_neumann(mesh, topology, classification, flux, t)};
}

DiscreteSolution solve_parabolic(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification,
                                 const ProblemCoefficients& coeffs, const ScalarField& f,
                                 const FluxField& flux, const ScalarField& u_D,
                                 const ScalarField& u0, const TimeGrid& grid,
                                 const Eigen::VectorXd* initial_multiplier,
                                 const StepObserver& observer) {
  const GlobalOperators ops = assemble_operators(mesh, topology, classification, coeffs);
  const int n_dofs = ops.primal_dofs;
  const int n_mult = ops.multipliers;
  const double k = grid.k;

  auto [m_plus, m_minus] = step_matrices(ops, k);
  const SparseLuSolver lu(m_plus);  // factorized once, reused every step

  // W^0: nodal interpolation of u0 plus the supplied initial multiplier.
  Eigen::VectorXd state = Eigen::VectorXd::Zero(n_dofs + n_mult);
  for (int m = 0; m < mesh.element_count(); ++m)
    for (int i = 0; i < 3; ++i)
      state[3 * m + i] = u0(mesh.coordinates[mesh.elements[m][i]], 0.0);
  if (initial_multiplier) {
    if (initial_multiplier->size() != n_mult)
      throw std::invalid_argument("solve_parabolic: initial multiplier length mismatch");
    state.tail(n_mult) = *initial_multiplier;
  }

  auto loads = load_at_time(mesh, topology, classification, f, flux, 0, k);
  Eigen::VectorXd bd_prev = assemble_dirichlet(mesh, topology, classification, u_D, 0.0);

  for (int n = 1; n <= grid.n_steps; ++n) {
    const double t = n * k;
    auto loads_next = load_at_time(mesh, topology, classification, f, flux, n, k);
    Eigen::VectorXd bd_next = assemble_dirichlet(mesh, topology, classification, u_D, t);

    Eigen::VectorXd rhs = m_minus.eigen() * state;
    rhs.head(n_dofs) +=
        k * 0.5 * (loads.first + loads.second + loads_next.first + loads_next.second);
    rhs.tail(n_mult) += 0.5 * (bd_prev + bd_next);

    state = lu.solve(rhs);
    if (!state.allFinite())
      throw SolverError("solve_parabolic: non-finite state at step " + std::to_string(n) +
                        " (t = " + std::to_string(t) + ")");

    if (observer) observer(n, t, state.head(n_dofs), state.tail(n_mult));
    loads = std::move(loads_next);
    bd_prev = std::move(bd_next);
  }

  DiscreteSolution sol;
  sol.primal = state.head(n_dofs);
  sol.multiplier = state.tail(n_mult);
  return sol;
}

}  // namespace phfem
