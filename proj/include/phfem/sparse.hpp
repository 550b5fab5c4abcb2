#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace phfem {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinate-format accumulation buffer; duplicate (i,j) pairs are summed
/// when the matrix is compressed.
struct TripletBuffer {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_idx;
  std::vector<int> col_idx;
  std::vector<double> values;

  TripletBuffer() = default;
  TripletBuffer(int nrows, int ncols) : rows(nrows), cols(ncols) {}

  void reserve(std::size_t n) {
    row_idx.reserve(n);
    col_idx.reserve(n);
    values.reserve(n);
  }

  void add(int i, int j, double v) {
    row_idx.push_back(i);
    col_idx.push_back(j);
    values.push_back(v);
  }

  std::size_t size() const { return values.size(); }
};

/// Compressed sparse matrix. Construction from triplets sums duplicates in
/// canonical order (row-major position, ties by insertion order), so the
/// stored values are bit-identical across runs for the same buffer.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(Eigen::SparseMatrix<double> m) : m_(std::move(m)) {
    m_.makeCompressed();
  }

  static SparseMatrix from_triplets(const TripletBuffer& buffer);

  int rows() const { return static_cast<int>(m_.rows()); }
  int cols() const { return static_cast<int>(m_.cols()); }
  std::int64_t nonzeros() const { return m_.nonZeros(); }
  double coeff(int i, int j) const { return m_.coeff(i, j); }

  Eigen::VectorXd diagonal() const;

  const Eigen::SparseMatrix<double>& eigen() const { return m_; }

 private:
  Eigen::SparseMatrix<double> m_;
};

/// Component i = sum of values where indices == i; missing indices give 0.
/// Throws std::out_of_range on an index outside [0, length).
Eigen::VectorXd scatter_add(const std::vector<int>& indices,
                            const std::vector<double>& values, int length);

/// Direct sparse LU solve with partial pivoting (column-reordered). Checks
/// the residual and throws SolverError on structural or numerical
/// singularity; there is no least-squares fallback.
Eigen::VectorXd solve_sparse(const SparseMatrix& matrix, const Eigen::VectorXd& rhs);

/// Reusable factorization for repeated solves against one matrix.
class SparseLuSolver {
 public:
  explicit SparseLuSolver(const SparseMatrix& matrix);
  ~SparseLuSolver();
  SparseLuSolver(SparseLuSolver&&) noexcept;
  SparseLuSolver& operator=(SparseLuSolver&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace phfem
