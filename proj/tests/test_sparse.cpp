#include "phfem/sparse.hpp"

#include <doctest.h>

#include <random>

using namespace phfem;

TEST_CASE("from_triplets sums duplicates") {
  TripletBuffer buf(2, 2);
  buf.add(0, 0, 2.0);
  buf.add(0, 0, 3.0);
  const SparseMatrix m = SparseMatrix::from_triplets(buf);
  CHECK(m.coeff(0, 0) == 5.0);
  CHECK(m.coeff(1, 1) == 0.0);
}

TEST_CASE("empty buffer gives the zero matrix") {
  const SparseMatrix m = SparseMatrix::from_triplets(TripletBuffer(3, 3));
  CHECK(m.rows() == 3);
  CHECK(m.nonzeros() == 0);
}

TEST_CASE("out-of-range triplets are rejected") {
  TripletBuffer buf(2, 2);
  buf.add(2, 0, 1.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(buf), std::out_of_range);
}

TEST_CASE("compression is bit-deterministic for a fixed buffer") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> idx(0, 19);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  TripletBuffer buf(20, 20);
  for (int k = 0; k < 500; ++k) buf.add(idx(rng), idx(rng), val(rng));

  const SparseMatrix a = SparseMatrix::from_triplets(buf);
  const SparseMatrix b = SparseMatrix::from_triplets(buf);
  REQUIRE(a.nonzeros() == b.nonzeros());
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) CHECK(a.coeff(i, j) == b.coeff(i, j));
}

TEST_CASE("scatter_add accumulates and zero-fills") {
  const Eigen::VectorXd v = scatter_add({0, 0, 2}, {1.0, 2.0, 4.0}, 3);
  CHECK(v[0] == 3.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 4.0);

  const Eigen::VectorXd empty = scatter_add({}, {}, 2);
  CHECK(empty.isZero(0.0));

  CHECK_THROWS_AS(scatter_add({3}, {1.0}, 3), std::out_of_range);
}

TEST_CASE("solve_sparse handles identity and permutation systems") {
  TripletBuffer id(4, 4);
  for (int i = 0; i < 4; ++i) id.add(i, i, 1.0);
  Eigen::VectorXd rhs(4);
  rhs << 1, 2, 3, 4;
  CHECK((solve_sparse(SparseMatrix::from_triplets(id), rhs) - rhs).norm() == 0.0);

  TripletBuffer perm(2, 2);
  perm.add(0, 1, 1.0);
  perm.add(1, 0, 1.0);
  Eigen::VectorXd ab(2);
  ab << 5.0, -3.0;
  const Eigen::VectorXd x = solve_sparse(SparseMatrix::from_triplets(perm), ab);
  CHECK(x[0] == doctest::Approx(-3.0));
  CHECK(x[1] == doctest::Approx(5.0));
}

TEST_CASE("singular systems raise SolverError instead of returning NaN") {
  TripletBuffer buf(3, 3);
  buf.add(0, 0, 1.0);
  buf.add(1, 1, 1.0);
  // row 2 is empty
  Eigen::VectorXd rhs(3);
  rhs << 1, 1, 1;
  CHECK_THROWS_AS(solve_sparse(SparseMatrix::from_triplets(buf), rhs), SolverError);

  TripletBuffer rank1(2, 2);
  rank1.add(0, 0, 1.0);
  rank1.add(0, 1, 1.0);
  rank1.add(1, 0, 1.0);
  rank1.add(1, 1, 1.0);
  Eigen::VectorXd rhs2(2);
  rhs2 << 1, 2;
  CHECK_THROWS_AS(solve_sparse(SparseMatrix::from_triplets(rank1), rhs2), SolverError);
}

TEST_CASE("solve_sparse rejects shape mismatches") {
  TripletBuffer rect(2, 3);
  rect.add(0, 0, 1.0);
  CHECK_THROWS_AS(solve_sparse(SparseMatrix::from_triplets(rect), Eigen::VectorXd::Zero(3)),
                  SolverError);

  TripletBuffer sq(2, 2);
  sq.add(0, 0, 1.0);
  sq.add(1, 1, 1.0);
  CHECK_THROWS_AS(solve_sparse(SparseMatrix::from_triplets(sq), Eigen::VectorXd::Zero(3)),
                  SolverError);
}
