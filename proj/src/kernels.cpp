#include "hsim/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace hsim::kernels {

namespace {

constexpr Eigen::Index kColumnChunk = 16;
constexpr Eigen::Index kRowChunk = 512;

std::array<double, 3> corner_half_cotangents(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 p[3] = {a, b, c};
  std::array<double, 3> cot{};
  for (int k = 0; k < 3; ++k) {
    const Vec3 u = p[(k + 1) % 3] - p[k];
    const Vec3 v = p[(k + 2) % 3] - p[k];
    cot[k] = 0.5 * u.dot(v) / u.cross(v).norm();
  }
  return cot;
}

Eigen::Index chunk_count(Eigen::Index total, Eigen::Index chunk) {
  return (total + chunk - 1) / chunk;
}

struct SparseColumn {
  std::vector<int> rows;
  std::vector<double> values;
};

// Gathers column j of A * B with a dense accumulator. `marker` and `acc` are
// per-thread scratch of size A.rows(); `marker` holds -1 outside the current
// column.
void product_column(const SparseMatrix& a, const SparseMatrix& b, Eigen::Index j,
                    std::vector<int>& marker, std::vector<double>& acc, SparseColumn& out) {
  out.rows.clear();
  for (SparseMatrix::InnerIterator bit(b, j); bit; ++bit) {
    const double bkj = bit.value();
    for (SparseMatrix::InnerIterator ait(a, bit.row()); ait; ++ait) {
      const int i = static_cast<int>(ait.row());
      if (marker[i] != static_cast<int>(j)) {
        marker[i] = static_cast<int>(j);
        acc[i] = 0.0;
        out.rows.push_back(i);
      }
      acc[i] += ait.value() * bkj;
    }
  }
  std::sort(out.rows.begin(), out.rows.end());
  out.values.resize(out.rows.size());
  for (std::size_t k = 0; k < out.rows.size(); ++k)
    out.values[k] = acc[out.rows[k]];
}

SparseMatrix from_columns(Eigen::Index rows, const std::vector<SparseColumn>& columns) {
  SparseMatrix m(rows, static_cast<Eigen::Index>(columns.size()));
  std::size_t nnz = 0;
  for (const auto& c : columns)
    nnz += c.rows.size();
  m.reserve(static_cast<Eigen::Index>(nnz));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    m.startVec(static_cast<Eigen::Index>(j));
    for (std::size_t k = 0; k < columns[j].rows.size(); ++k)
      m.insertBack(columns[j].rows[k], static_cast<Eigen::Index>(j)) = columns[j].values[k];
  }
  m.finalize();
  return m;
}

SparseMatrix symmetrized(const SparseMatrix& c) {
  SparseMatrix t = c.transpose();
  SparseMatrix s = 0.5 * (c + t);
  s.makeCompressed();
  return s;
}

} // namespace

void set_thread_count(int threads) {
  if (threads > 0)
    omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

std::vector<std::array<double, 3>> face_half_cotangents(const TriangleMesh& mesh) {
  std::vector<std::array<double, 3>> out(mesh.n_faces());
  const auto nf = static_cast<std::ptrdiff_t>(mesh.n_faces());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t f = 0; f < nf; ++f) {
    const Face& face = mesh.faces[f];
    out[f] = corner_half_cotangents(mesh.positions[face[0]], mesh.positions[face[1]],
                                    mesh.positions[face[2]]);
  }
  return out;
}

ColumnBlock sparse_times_block(const SparseMatrix& a, const ColumnBlock& x) {
  ColumnBlock y(a.rows(), x.cols());
  const Eigen::Index chunks = chunk_count(x.cols(), kColumnChunk);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kColumnChunk;
    const Eigen::Index width = std::min(kColumnChunk, x.cols() - begin);
    y.middleCols(begin, width).noalias() = a * x.middleCols(begin, width);
  }
  return y;
}

Eigen::MatrixXd transpose_times(const ColumnBlock& x, const ColumnBlock& y) {
  Eigen::MatrixXd r(x.cols(), y.cols());
  const Eigen::Index chunks = chunk_count(y.cols(), kColumnChunk);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kColumnChunk;
    const Eigen::Index width = std::min(kColumnChunk, y.cols() - begin);
    r.middleCols(begin, width).noalias() = x.transpose() * y.middleCols(begin, width);
  }
  return r;
}

ColumnBlock block_times_small(const ColumnBlock& x, const Eigen::MatrixXd& b) {
  ColumnBlock y(x.rows(), b.cols());
  const Eigen::Index chunks = chunk_count(x.rows(), kRowChunk);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kRowChunk;
    const Eigen::Index height = std::min(kRowChunk, x.rows() - begin);
    y.middleRows(begin, height).noalias() = x.middleRows(begin, height) * b;
  }
  return y;
}

SparseMatrix sparse_product(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<SparseColumn> columns(static_cast<std::size_t>(b.cols()));
#pragma omp parallel
  {
    std::vector<int> marker(static_cast<std::size_t>(a.rows()), -1);
    std::vector<double> acc(static_cast<std::size_t>(a.rows()), 0.0);
#pragma omp for schedule(dynamic, 64)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      product_column(a, b, j, marker, acc, columns[j]);
  }
  return from_columns(a.rows(), columns);
}

SparseMatrix galerkin_product(const SparseMatrix& a, const SparseMatrix& u) {
  const SparseMatrix au = sparse_product(a, u);
  const SparseMatrix ut = u.transpose();
  return symmetrized(sparse_product(ut, au));
}

namespace serial {

std::vector<std::array<double, 3>> face_half_cotangents(const TriangleMesh& mesh) {
  std::vector<std::array<double, 3>> out;
  out.reserve(mesh.n_faces());
  for (const Face& face : mesh.faces)
    out.push_back(corner_half_cotangents(mesh.positions[face[0]], mesh.positions[face[1]],
                                         mesh.positions[face[2]]));
  return out;
}

ColumnBlock sparse_times_block(const SparseMatrix& a, const ColumnBlock& x) { return a * x; }

Eigen::MatrixXd transpose_times(const ColumnBlock& x, const ColumnBlock& y) {
  return x.transpose() * y;
}

ColumnBlock block_times_small(const ColumnBlock& x, const Eigen::MatrixXd& b) { return x * b; }

SparseMatrix sparse_product(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix c = (a * b).pruned(0.0);
  c.makeCompressed();
  return c;
}

SparseMatrix galerkin_product(const SparseMatrix& a, const SparseMatrix& u) {
  SparseMatrix c = SparseMatrix(u.transpose()) * a * u;
  return symmetrized(c);
}

} // namespace serial

} // namespace hsim::kernels
