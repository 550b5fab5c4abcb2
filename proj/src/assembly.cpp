#include "phfem/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phfem {

namespace {

// Barycentric gradients and area of a CCW triangle.
struct ElementGeometry {
  double area;
  std::array<Vec2, 3> grad;  // grad lambda_i, constant on T
};

ElementGeometry element_geometry(const std::array<Vec2, 3>& v) {
  const double twice_area = signed_area2(v[0], v[1], v[2]);
  if (!(twice_area > 0.0))
    throw std::runtime_error("local_element_matrices: degenerate or non-CCW triangle");
  ElementGeometry g;
  g.area = 0.5 * twice_area;
  g.grad[0] = Vec2(v[1].y() - v[2].y(), v[2].x() - v[1].x()) / twice_area;
  g.grad[1] = Vec2(v[2].y() - v[0].y(), v[0].x() - v[2].x()) / twice_area;
  g.grad[2] = Vec2(v[0].y() - v[1].y(), v[1].x() - v[0].x()) / twice_area;
  return g;
}

std::array<Vec2, 3> element_vertices(const Mesh& mesh, int m) {
  const auto& t = mesh.elements[m];
  return {mesh.coordinates[t[0]], mesh.coordinates[t[1]], mesh.coordinates[t[2]]};
}

// Midpoints of the edges opposite each vertex.
std::array<Vec2, 3> edge_midpoints(const std::array<Vec2, 3>& v) {
  return {0.5 * (v[1] + v[2]), 0.5 * (v[2] + v[0]), 0.5 * (v[0] + v[1])};
}

constexpr double kR[3][3] = {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};

}  // namespace

ProblemCoefficients::ProblemCoefficients(const Eigen::Matrix2d& A_, const Eigen::Vector2d& p_,
                                         double delta_)
    : A(A_), p(p_), delta(delta_) {
  if (std::abs(A(0, 1) - A(1, 0)) > 1e-14 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("ProblemCoefficients: A is not symmetric");
  // Positive definiteness of a symmetric 2x2: positive leading minors.
  if (A(0, 0) <= 0.0 || A.determinant() <= 0.0)
    throw std::invalid_argument("ProblemCoefficients: A is not positive definite");
}

LocalMatrices local_element_matrices(const std::array<Vec2, 3>& vertices,
                                     const ProblemCoefficients& coeffs) {
  const ElementGeometry g = element_geometry(vertices);
  LocalMatrices local;

  // Filled from the upper triangle so symmetry is exact in floating point.
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const double value = g.area * (coeffs.A * g.grad[i]).dot(g.grad[j]);
      local.stiffness(i, j) = value;
      local.stiffness(j, i) = value;
    }

  // Test row i of the convection term integrates (p . grad u_h) phi_i, so
  // the entry depends on the trial (column) index only.
  for (int j = 0; j < 3; ++j) {
    const double dj = g.area / 3.0 * coeffs.p.dot(g.grad[j]);
    for (int i = 0; i < 3; ++i) local.convection(i, j) = dj;
  }

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      local.mass(i, j) = coeffs.delta * g.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);

  return local;
}

Eigen::RowVector3d local_constraint_row(double edge_length, int sign, int local_index) {
  if (local_index < 0 || local_index > 2)
    throw std::invalid_argument("local_constraint_row: local_index must be 0, 1 or 2");
  if (edge_length <= 0.0)
    throw std::invalid_argument("local_constraint_row: edge length must be positive");
  Eigen::RowVector3d row;
  for (int c = 0; c < 3; ++c) row[c] = sign * edge_length * kR[local_index][c];
  return row;
}

namespace {

// The element-block operators are block diagonal with exactly three entries
// per column (column 3m+j holds rows 3m..3m+2 of element m), so their
// compressed layout is known up front and each matrix is filled in a single
// pass. Entry values are identical to a triplet assembly; there are no
// duplicates to sum.
template <typename BlockFn>
SparseMatrix assemble_block_diagonal(int ne, BlockFn&& block_of) {
  const int n_dofs = 3 * ne;
  Eigen::SparseMatrix<double> m(n_dofs, n_dofs);
  int* outer = m.outerIndexPtr();
  for (int c = 0; c <= n_dofs; ++c) outer[c] = 3 * c;
  m.resizeNonZeros(static_cast<Eigen::Index>(9) * ne);
  int* inner = m.innerIndexPtr();
  double* vals = m.valuePtr();
  for (int e = 0; e < ne; ++e) {
    const Eigen::Matrix3d block = block_of(e);
    const std::size_t base = static_cast<std::size_t>(9) * e;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        inner[base + 3 * j + i] = 3 * e + i;
        vals[base + 3 * j + i] = block(i, j);
      }
  }
  return SparseMatrix(std::move(m));
}

}  // namespace

GlobalOperators assemble_volume_operators(const Mesh& mesh, const ProblemCoefficients& coeffs) {
  const int ne = mesh.element_count();

  GlobalOperators ops;
  ops.primal_dofs = 3 * ne;
  ops.stiffness = assemble_block_diagonal(ne, [&](int m) {
    return local_element_matrices(element_vertices(mesh, m), coeffs).stiffness;
  });
  ops.convection = assemble_block_diagonal(ne, [&](int m) {
    return local_element_matrices(element_vertices(mesh, m), coeffs).convection;
  });
  ops.mass = assemble_block_diagonal(ne, [&](int m) {
    return local_element_matrices(element_vertices(mesh, m), coeffs).mass;
  });
  ops.mass_unit = assemble_block_diagonal(ne, [&](int m) {
    const double area = element_area(mesh, m);
    Eigen::Matrix3d block;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) block(i, j) = area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
    return block;
  });
  return ops;
}

SparseMatrix assemble_constraint(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification) {
  const int n_dofs = 3 * mesh.element_count();
  const int n_mult = classification.multiplier_count();
  if (static_cast<int>(classification.retained_pos.size()) != topology.edge_count())
    throw std::runtime_error("assemble_constraint: classification does not match topology");

  const std::vector<double> lengths = edge_lengths(mesh, topology);
  TripletBuffer c_buf(n_mult, n_dofs);
  c_buf.reserve(6 * static_cast<std::size_t>(n_mult));
  for (int e = 0; e < topology.edge_count(); ++e) {
    const int row = classification.retained_pos[e];
    if (row < 0) continue;  // Neumann edge: no constraint row
    const auto& [t_plus, t_minus] = topology.edge_elements[e];
    const int led = topology.local_in_tplus[e];
    for (int c = 0; c < 3; ++c)
      if (kR[led][c] != 0.0) c_buf.add(row, 3 * t_plus + c, lengths[e] * kR[led][c]);
    if (t_minus >= 0) {
      const int led_tn = topology.local_in_tminus[e];
      for (int c = 0; c < 3; ++c)
        if (kR[led_tn][c] != 0.0) c_buf.add(row, 3 * t_minus + c, -lengths[e] * kR[led_tn][c]);
    }
  }
  return SparseMatrix::from_triplets(c_buf);
}

GlobalOperators assemble_operators(const Mesh& mesh, const EdgeTopology& topology,
                                   const EdgeClassification& classification,
                                   const ProblemCoefficients& coeffs) {
  GlobalOperators ops = assemble_volume_operators(mesh, coeffs);
  ops.constraint = assemble_constraint(mesh, topology, classification);
  ops.multipliers = classification.multiplier_count();
  return ops;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f, double time) {
  const int ne = mesh.element_count();
  std::vector<int> indices;
  std::vector<double> values;
  indices.reserve(3 * static_cast<std::size_t>(ne));
  values.reserve(3 * static_cast<std::size_t>(ne));
  for (int m = 0; m < ne; ++m) {
    const auto v = element_vertices(mesh, m);
    const auto mids = edge_midpoints(v);
    const double area = element_area(mesh, m);
    std::array<double, 3> fm;
    for (int i = 0; i < 3; ++i) {
      fm[i] = f(mids[i], time);
      if (!std::isfinite(fm[i]))
        throw std::runtime_error("assemble_load: non-finite load sample in element " +
                                 std::to_string(m + 1));
    }
    // phi_i vanishes at its opposite midpoint and is 1/2 at the other two.
    for (int i = 0; i < 3; ++i) {
      indices.push_back(3 * m + i);
      values.push_back(area / 3.0 * 0.5 * (fm[(i + 1) % 3] + fm[(i + 2) % 3]));
    }
  }
  return scatter_add(indices, values, 3 * ne);
}

Eigen::VectorXd assemble_neumann(const Mesh& mesh, const EdgeTopology& topology,
                                 const EdgeClassification& classification,
                                 const FluxField& flux, double time) {
  std::vector<int> indices;
  std::vector<double> values;
  for (int e : classification.neumann_edge_ids) {
    const auto& [a, b] = topology.edge_nodes[e];
    const Vec2 mid = 0.5 * (mesh.coordinates[a] + mesh.coordinates[b]);
    const Vec2 d = mesh.coordinates[b] - mesh.coordinates[a];
    const double length = d.norm();
    const Vec2 normal = Vec2(d.y(), -d.x()) / length;
    const double value = flux(mid, normal, time);
    if (!std::isfinite(value))
      throw std::runtime_error("assemble_neumann: non-finite flux sample on edge (" +
                               std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
    const int elem = topology.edge_elements[e][0];
    const int led = topology.local_in_tplus[e];
    for (int c = 0; c < 3; ++c) {
      indices.push_back(3 * elem + c);
      values.push_back(length * value * kR[led][c]);
    }
  }
  return scatter_add(indices, values, 3 * mesh.element_count());
}

Eigen::VectorXd assemble_dirichlet(const Mesh& mesh, const EdgeTopology& topology,
                                   const EdgeClassification& classification,
                                   const ScalarField& u_D, double time) {
  Eigen::VectorXd bd = Eigen::VectorXd::Zero(classification.multiplier_count());
  for (int e : classification.dirichlet_edge_ids) {
    const auto& [a, b] = topology.edge_nodes[e];
    const Vec2 mid = 0.5 * (mesh.coordinates[a] + mesh.coordinates[b]);
    const double length = (mesh.coordinates[b] - mesh.coordinates[a]).norm();
    const int row = classification.retained_pos[e];
    bd[row] = -length * u_D(mid, time);
  }
  return bd;
}

}  // namespace phfem
