#include "phfem/sparse.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace phfem {

namespace {

void check_indices(const TripletBuffer& buffer) {
  if (buffer.row_idx.size() != buffer.values.size() ||
      buffer.col_idx.size() != buffer.values.size())
    throw std::invalid_argument("TripletBuffer: index/value lengths differ");
  for (std::size_t k = 0; k < buffer.values.size(); ++k) {
    if (buffer.row_idx[k] < 0 || buffer.row_idx[k] >= buffer.rows ||
        buffer.col_idx[k] < 0 || buffer.col_idx[k] >= buffer.cols)
      throw std::out_of_range("TripletBuffer: entry " + std::to_string(k) + " at (" +
                              std::to_string(buffer.row_idx[k]) + "," +
                              std::to_string(buffer.col_idx[k]) + ") outside " +
                              std::to_string(buffer.rows) + "x" + std::to_string(buffer.cols));
  }
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(const TripletBuffer& buffer) {
  check_indices(buffer);
  const std::size_t n = buffer.size();

  // Canonical duplicate summing: order by (row, col), ties by insertion, and
  // accumulate runs left to right, so the stored values are bit-identical
  // across runs independent of the backend. Element-wise assembly emits its
  // triplets already row-major and duplicate-free, in which case the buffer
  // is used as-is.
  auto row_col_less = [&buffer](std::size_t a, std::size_t b) {
    if (buffer.row_idx[a] != buffer.row_idx[b]) return buffer.row_idx[a] < buffer.row_idx[b];
    return buffer.col_idx[a] < buffer.col_idx[b];
  };
  bool sorted_unique = true;
  for (std::size_t k = 1; k < n && sorted_unique; ++k)
    if (!row_col_less(k - 1, k)) sorted_unique = false;

  std::vector<int> smi, smj;
  std::vector<double> smv;
  const int* mi = buffer.row_idx.data();
  const int* mj = buffer.col_idx.data();
  const double* mv = buffer.values.data();
  std::size_t nnz = n;
  if (!sorted_unique) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::stable_sort(perm.begin(), perm.end(),
                     [&row_col_less](std::uint32_t a, std::uint32_t b) {
                       return row_col_less(a, b);
                     });
    smi.reserve(n);
    smj.reserve(n);
    smv.reserve(n);
    std::size_t k = 0;
    while (k < n) {
      const int i = buffer.row_idx[perm[k]];
      const int j = buffer.col_idx[perm[k]];
      double sum = 0.0;
      while (k < n && buffer.row_idx[perm[k]] == i && buffer.col_idx[perm[k]] == j)
        sum += buffer.values[perm[k++]];
      smi.push_back(i);
      smj.push_back(j);
      smv.push_back(sum);
    }
    mi = smi.data();
    mj = smj.data();
    mv = smv.data();
    nnz = smv.size();
  }

  // Direct in-place compressed-column fill: a stable scatter by column keeps
  // rows ascending within each column because the merged order is row-major.
  Eigen::SparseMatrix<double> m(buffer.rows, buffer.cols);
  int* outer = m.outerIndexPtr();
  std::fill(outer, outer + buffer.cols + 1, 0);
  for (std::size_t e = 0; e < nnz; ++e) ++outer[mj[e] + 1];
  for (int c = 0; c < buffer.cols; ++c) outer[c + 1] += outer[c];
  m.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int* inner = m.innerIndexPtr();
  double* vals = m.valuePtr();
  std::vector<int> cursor(outer, outer + buffer.cols);
  for (std::size_t e = 0; e < nnz; ++e) {
    const int p = cursor[mj[e]]++;
    inner[p] = mi[e];
    vals[p] = mv[e];
  }
  return SparseMatrix(std::move(m));
}

Eigen::VectorXd SparseMatrix::diagonal() const {
  const int n = std::min(rows(), cols());
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < m_.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m_, j); it; ++it)
      if (it.row() == it.col()) d[it.row()] = it.value();
  return d;
}

Eigen::VectorXd scatter_add(const std::vector<int>& indices, const std::vector<double>& values,
                            int length) {
  if (indices.size() != values.size())
    throw std::invalid_argument("scatter_add: index/value lengths differ");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(length);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= length)
      throw std::out_of_range("scatter_add: index " + std::to_string(indices[k]) +
                              " outside [0," + std::to_string(length) + ")");
    out[indices[k]] += values[k];
  }
  return out;
}

struct SparseLuSolver::Impl {
  Eigen::SparseMatrix<double> matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

SparseLuSolver::SparseLuSolver(const SparseMatrix& matrix) : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols())
    throw SolverError("solve_sparse: matrix is not square (" + std::to_string(matrix.rows()) +
                      "x" + std::to_string(matrix.cols()) + ")");
  impl_->matrix = matrix.eigen();
  impl_->lu.compute(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("solve_sparse: factorization failed (structurally or numerically "
                      "singular matrix): " + impl_->lu.lastErrorMessage());
}

SparseLuSolver::~SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(SparseLuSolver&&) noexcept = default;
SparseLuSolver& SparseLuSolver::operator=(SparseLuSolver&&) noexcept = default;

Eigen::VectorXd SparseLuSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != impl_->matrix.rows())
    throw SolverError("solve_sparse: rhs length " + std::to_string(rhs.size()) +
                      " does not match matrix size " + std::to_string(impl_->matrix.rows()));
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("solve_sparse: back substitution failed");

  // One step of iterative refinement, then enforce the residual contract.
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd residual = rhs - impl_->matrix * x;
  if (residual.lpNorm<Eigen::Infinity>() / scale > 1e-13) {
    x += impl_->lu.solve(residual);
    residual = rhs - impl_->matrix * x;
  }
  const double rel = residual.lpNorm<Eigen::Infinity>() / scale;
  if (!std::isfinite(rel) || rel > 1e-10)
    throw SolverError("solve_sparse: residual " + std::to_string(rel) +
                      " exceeds tolerance (ill-conditioned or singular system)");
  return x;
}

Eigen::VectorXd solve_sparse(const SparseMatrix& matrix, const Eigen::VectorXd& rhs) {
  return SparseLuSolver(matrix).solve(rhs);
}

}  // namespace phfem
