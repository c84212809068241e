#pragma once

#include "hsim/types.hpp"

#include <memory>

namespace hsim {

// Sparse symmetric LDL^T factorization with a fill-reducing (AMD) ordering,
// P A P^T = L D L^T. Immutable after construction; solves are thread-safe.
class LdltFactor {
public:
  // Throws Error(SingularShift) when a pivot vanishes to working precision.
  explicit LdltFactor(const SparseMatrix& a);
  ~LdltFactor();
  LdltFactor(LdltFactor&&) noexcept;
  LdltFactor& operator=(LdltFactor&&) noexcept;

  Eigen::Index rows() const;

  // Solves every column of `b`. Columns are processed in fixed-width panels
  // distributed over threads; each column's arithmetic does not depend on the
  // panel it lands in.
  ColumnBlock solve(const ColumnBlock& b) const;
  Vector solve(const Vector& b) const;

  // Column-at-a-time reference path.
  ColumnBlock solve_serial(const ColumnBlock& b) const;

  // Negative entries of D; by Sylvester's law the number of negative
  // eigenvalues of A.
  Eigen::Index negative_pivots() const;

  Eigen::Index factor_nonzeros() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct DenseEigenpairs {
  Vector values;          // ascending
  Eigen::MatrixXd vectors; // columns, M-orthonormal
};

// Solves S x = lambda M x for symmetric S and symmetric positive definite M
// by reducing through the Cholesky factor of M. Only the lower triangles are
// read. Throws Error(RankCollapse) when M is not positive definite.
DenseEigenpairs dense_generalized_eig(const Eigen::MatrixXd& s, const Eigen::MatrixXd& m);

} // namespace hsim
