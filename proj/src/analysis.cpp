#include "phfem/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phfem {

namespace {

std::array<Vec2, 3> element_vertices(const Mesh& mesh, int m) {
  const auto& t = mesh.elements[m];
  return {mesh.coordinates[t[0]], mesh.coordinates[t[1]], mesh.coordinates[t[2]]};
}

std::array<Vec2, 3> barycentric_gradients(const std::array<Vec2, 3>& v) {
  const double twice_area = signed_area2(v[0], v[1], v[2]);
  return {Vec2(v[1].y() - v[2].y(), v[2].x() - v[1].x()) / twice_area,
          Vec2(v[2].y() - v[0].y(), v[0].x() - v[2].x()) / twice_area,
          Vec2(v[0].y() - v[1].y(), v[1].x() - v[0].x()) / twice_area};
}

}  // namespace

Eigen::VectorXd exact_multiplier(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification,
                                 const ManufacturedProblem& problem, double time) {
  Eigen::VectorXd k(classification.multiplier_count());
  for (int e : classification.retained_edges) {
    const auto& [a, b] = topology.edge_nodes[e];
    const Vec2 mid = 0.5 * (mesh.coordinates[a] + mesh.coordinates[b]);
    const Vec2 nu = edge_normal(mesh, topology, e);
    const double value =
        (problem.coeffs.A * problem.grad_u(mid, time) + problem.u(mid, time) * problem.coeffs.p)
            .dot(nu);
    k[classification.retained_pos[e]] = value;
  }
  return k;
}

double error_h1(const Mesh& mesh, const DiscreteSolution& solution,
                const ManufacturedProblem& problem, double time) {
  const TriangleQuadrature& rule = TriangleQuadrature::default_rule();
  double sum = 0.0;
  for (int m = 0; m < mesh.element_count(); ++m) {
    const auto v = element_vertices(mesh, m);
    const auto grads = barycentric_gradients(v);
    Eigen::Vector2d grad_h = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) grad_h += solution.primal[3 * m + i] * grads[i];
    sum += rule.integrate(v[0], v[1], v[2], [&](const Vec2& x) {
      return (problem.grad_u(x, time) - grad_h).squaredNorm();
    });
  }
  return std::sqrt(sum);
}

double error_l2(const Mesh& mesh, const DiscreteSolution& solution,
                const ManufacturedProblem& problem, double time) {
  const TriangleQuadrature& rule = TriangleQuadrature::default_rule();
  double sum = 0.0;
  for (int m = 0; m < mesh.element_count(); ++m) {
    const auto v = element_vertices(mesh, m);
    const double u0 = solution.primal[3 * m + 0];
    const double u1 = solution.primal[3 * m + 1];
    const double u2 = solution.primal[3 * m + 2];
    const double area = 0.5 * signed_area2(v[0], v[1], v[2]);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bc = rule.points[q];
      const Vec2 x = bc[0] * v[0] + bc[1] * v[1] + bc[2] * v[2];
      const double uh = bc[0] * u0 + bc[1] * u1 + bc[2] * u2;
      const double diff = problem.u(x, time) - uh;
      local += rule.weights[q] * diff * diff;
    }
    sum += area * local;
  }
  return std::sqrt(sum);
}

double error_multiplier(const Eigen::VectorXd& exact, const Eigen::VectorXd& discrete,
                        const SparseMatrix& constraint, const SparseMatrix& stiffness) {
  if (exact.size() != discrete.size() || exact.size() != constraint.rows())
    throw std::invalid_argument("error_multiplier: size mismatch");
  const Eigen::VectorXd weighted = constraint.eigen().transpose() * (exact - discrete);
  const Eigen::VectorXd diag = stiffness.diagonal();
  double worst = 0.0;
  bool any = false;
  for (int i = 0; i < weighted.size(); ++i) {
    if (diag[i] <= 0.0) continue;
    any = true;
    worst = std::max(worst, std::abs(weighted[i]) / std::sqrt(diag[i]));
  }
  if (!any) throw std::runtime_error("error_multiplier: all diagonal entries of B vanish");
  return worst;
}

std::vector<double> convergence_orders(const std::vector<double>& errors,
                                       const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("convergence_orders: need at least two matching levels");
  std::vector<double> orders;
  for (std::size_t j = 0; j + 1 < errors.size(); ++j) {
    if (errors[j] <= 0.0 || errors[j + 1] <= 0.0)
      throw std::domain_error("convergence_orders: non-positive error at level " +
                              std::to_string(j));
    if (hs[j] <= 0.0 || hs[j + 1] <= 0.0)
      throw std::domain_error("convergence_orders: non-positive h at level " +
                              std::to_string(j));
    orders.push_back(std::log(errors[j] / errors[j + 1]) / std::log(hs[j] / hs[j + 1]));
  }
  return orders;
}

Eigen::VectorXd hybrid_midpoint_traces(const EdgeTopology& topology,
                                       const Eigen::VectorXd& primal) {
  Eigen::VectorXd traces(topology.edge_count());
  for (int e = 0; e < topology.edge_count(); ++e) {
    const int m = topology.edge_elements[e][0];
    const int led = topology.local_in_tplus[e];
    // The midpoint of edge `led` averages the element's other two vertices.
    const int i = (led + 1) % 3;
    const int j = (led + 2) % 3;
    traces[e] = 0.5 * (primal[3 * m + i] + primal[3 * m + j]);
  }
  return traces;
}

ParabolicStudyRun run_parabolic_study(const Mesh& mesh, const EdgeTopology& topology,
                                      const EdgeClassification& classification,
                                      const ManufacturedProblem& problem,
                                      const TimeGrid& grid, const StepObserver& observer) {
  const double k = grid.k;
  const ScalarField f = [&problem, k](const Vec2& x, double t) { return problem.f(x, t + k); };
  const FluxField g = [&problem, k](const Vec2& x, const Vec2& nu, double t) {
    return problem.g(x, nu, t + k);
  };
  const ScalarField u_D = [&problem, k](const Vec2& x, double t) {
    return problem.u_D(x, t + k);
  };
  const Eigen::VectorXd lambda0 =
      exact_multiplier(mesh, topology, classification, problem, 0.0);

  StepObserver shifted_observer;
  if (observer)
    shifted_observer = [observer, k](int n, double t, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& lambda) {
      observer(n, t + k, u, lambda);
    };

  ParabolicStudyRun run;
  run.solution = solve_parabolic(mesh, topology, classification, problem.coeffs, f, g, u_D,
                                 problem.u0, grid, &lambda0, shifted_observer);
  run.evaluation_time = grid.t_end + k;
  return run;
}

Eigen::VectorXd cr_reference_solve(const Mesh& mesh, const EdgeTopology& topology,
                                   const EdgeClassification& classification,
                                   const ProblemCoefficients& coeffs, const ScalarField& f,
                                   const FluxField& flux, const ScalarField& u_D,
                                   double time) {
  const int ne = mesh.element_count();
  const int nr_edges = topology.edge_count();

  // Midpoint basis eta_e = 1 - 2 lambda_opp(e), one DOF per edge. Dirichlet
  // DOFs are pinned to u_D(m_E) by identity rows.
  std::vector<char> is_dirichlet(nr_edges, 0);
  for (int e : classification.dirichlet_edge_ids) is_dirichlet[e] = 1;

  // Per-element edge ids in local order.
  std::vector<std::array<int, 3>> element_edges(ne);
  for (int m = 0; m < ne; ++m) {
    const auto& t = mesh.elements[m];
    element_edges[m] = {topology.node_pair_to_edge(t[1], t[2]),
                        topology.node_pair_to_edge(t[2], t[0]),
                        topology.node_pair_to_edge(t[0], t[1])};
  }

  TripletBuffer buf(nr_edges, nr_edges);
  buf.reserve(9 * static_cast<std::size_t>(ne) + topology.edge_count());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr_edges);

  for (int m = 0; m < ne; ++m) {
    const auto v = element_vertices(mesh, m);
    const auto grads = barycentric_gradients(v);
    const double area = 0.5 * signed_area2(v[0], v[1], v[2]);
    const std::array<Vec2, 3> mids = {0.5 * (v[1] + v[2]), 0.5 * (v[2] + v[0]),
                                      0.5 * (v[0] + v[1])};
    for (int i = 0; i < 3; ++i) {
      const int row = element_edges[m][i];
      if (is_dirichlet[row]) continue;
      for (int j = 0; j < 3; ++j) {
        const Vec2 grad_i = -2.0 * grads[i];
        const Vec2 grad_j = -2.0 * grads[j];
        // stiffness + convection (p.grad u, tested against eta_i) + mass;
        // int eta_i = |T|/3, int eta_i eta_j = (|T|/3) delta_ij.
        double value = area * (coeffs.A * grad_i).dot(grad_j) +
                       (area / 3.0) * coeffs.p.dot(grad_j) +
                       (i == j ? coeffs.delta * area / 3.0 : 0.0);
        buf.add(row, element_edges[m][j], value);
      }
      // Load by the same edge-midpoint rule: eta_i(m_j) = delta_ij.
      rhs[row] += area / 3.0 * f(mids[i], time);
    }
  }

  // Neumann data: eta of the edge itself is 1 at the midpoint, others 0.
  for (int e : classification.neumann_edge_ids) {
    if (is_dirichlet[e]) continue;
    const auto& [a, b] = topology.edge_nodes[e];
    const Vec2 mid = 0.5 * (mesh.coordinates[a] + mesh.coordinates[b]);
    const Vec2 d = mesh.coordinates[b] - mesh.coordinates[a];
    const double length = d.norm();
    rhs[e] += length * flux(mid, Vec2(d.y(), -d.x()) / length, time);
  }

  for (int e = 0; e < nr_edges; ++e) {
    if (!is_dirichlet[e]) continue;
    const auto& [a, b] = topology.edge_nodes[e];
    const Vec2 mid = 0.5 * (mesh.coordinates[a] + mesh.coordinates[b]);
    buf.add(e, e, 1.0);
    rhs[e] = u_D(mid, time);
  }

  return solve_sparse(SparseMatrix::from_triplets(buf), rhs);
}

}  // namespace phfem
