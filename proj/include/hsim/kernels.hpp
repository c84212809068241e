#pragma once

#include "hsim/mesh.hpp"
#include "hsim/types.hpp"

#include <array>
#include <vector>

// Data-parallel building blocks shared by assembly, hierarchy construction and
// the subspace iterations. Work is split into chunks whose boundaries do not
// depend on the number of threads, and every output entry is produced by one
// thread with a fixed summation order, so results are bit-identical for any
// thread count.
//
// The `serial` namespace holds straightforward reference versions used by the
// tests and the benchmarks.
namespace hsim::kernels {

// Half cotangents of the three corner angles of every face; entry k belongs to
// the corner at face[k].
std::vector<std::array<double, 3>> face_half_cotangents(const TriangleMesh& mesh);

// A * X for sparse A and dense X.
ColumnBlock sparse_times_block(const SparseMatrix& a, const ColumnBlock& x);

// X^T * Y for two tall blocks with the same row count.
Eigen::MatrixXd transpose_times(const ColumnBlock& x, const ColumnBlock& y);

// X * B for tall X and small square-ish B.
ColumnBlock block_times_small(const ColumnBlock& x, const Eigen::MatrixXd& b);

// A * B for two sparse matrices. Row indices within each output column are
// sorted.
SparseMatrix sparse_product(const SparseMatrix& a, const SparseMatrix& b);

// U^T A U, made exactly symmetric.
SparseMatrix galerkin_product(const SparseMatrix& a, const SparseMatrix& u);

// Sets the worker count used by all kernels; 0 keeps the runtime default.
void set_thread_count(int threads);
int thread_count();

namespace serial {

std::vector<std::array<double, 3>> face_half_cotangents(const TriangleMesh& mesh);
ColumnBlock sparse_times_block(const SparseMatrix& a, const ColumnBlock& x);
Eigen::MatrixXd transpose_times(const ColumnBlock& x, const ColumnBlock& y);
ColumnBlock block_times_small(const ColumnBlock& x, const Eigen::MatrixXd& b);
SparseMatrix sparse_product(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix galerkin_product(const SparseMatrix& a, const SparseMatrix& u);

} // namespace serial

} // namespace hsim::kernels
