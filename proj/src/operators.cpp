#include "hsim/operators.hpp"

#include "hsim/error.hpp"
#include "hsim/kernels.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace hsim {

namespace {

using Triplet = Eigen::Triplet<double, int>;

// Maps mesh vertices to rows; -1 for eliminated vertices.
std::vector<int> row_of_vertex(const TriangleMesh& mesh, const std::vector<int>& dofs) {
  std::vector<int> row(mesh.n_vertices(), -1);
  for (std::size_t k = 0; k < dofs.size(); ++k)
    row[dofs[k]] = static_cast<int>(k);
  return row;
}

} // namespace

std::vector<int> degrees_of_freedom(const TriangleMesh& mesh, Boundary boundary) {
  std::vector<int> dofs;
  dofs.reserve(mesh.n_vertices());
  if (boundary == Boundary::Neumann) {
    for (std::size_t v = 0; v < mesh.n_vertices(); ++v)
      dofs.push_back(static_cast<int>(v));
    return dofs;
  }
  const std::vector<bool> on_boundary = boundary_vertex_mask(mesh);
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v)
    if (!on_boundary[v])
      dofs.push_back(static_cast<int>(v));
  if (dofs.empty())
    throw Error(ErrorKind::Topology, "Dirichlet boundary leaves no interior vertices");
  return dofs;
}

SparseMatrix assemble_stiffness(const TriangleMesh& mesh, Boundary boundary) {
  const auto n = static_cast<int>(mesh.n_vertices());
  const auto cot = kernels::face_half_cotangents(mesh);

  std::vector<Triplet> triplets;
  triplets.reserve(6 * mesh.n_faces());
  for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      // Corner k is opposite the edge (k+1, k+2).
      const int i = face[(k + 1) % 3];
      const int j = face[(k + 2) % 3];
      triplets.emplace_back(i, j, -cot[f][k]);
      triplets.emplace_back(j, i, -cot[f][k]);
    }
  }
  SparseMatrix off(n, n);
  off.setFromTriplets(triplets.begin(), triplets.end());

  // Diagonal as the negated off-diagonal row sum keeps constants in the kernel
  // to the rounding of a single sum.
  triplets.clear();
  triplets.reserve(off.nonZeros() + n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(off, j); it; ++it) {
      sum += it.value();
      triplets.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
    triplets.emplace_back(j, j, -sum);
  }

  const std::vector<int> dofs = degrees_of_freedom(mesh, boundary);
  if (boundary == Boundary::Dirichlet) {
    const std::vector<int> row = row_of_vertex(mesh, dofs);
    std::vector<Triplet> kept;
    kept.reserve(triplets.size());
    for (const Triplet& t : triplets)
      if (row[t.row()] >= 0 && row[t.col()] >= 0)
        kept.emplace_back(row[t.row()], row[t.col()], t.value());
    triplets.swap(kept);
  }
  const auto m = static_cast<int>(dofs.size());
  SparseMatrix s(m, m);
  s.setFromTriplets(triplets.begin(), triplets.end());
  s.makeCompressed();
  return s;
}

SparseMatrix assemble_lumped_mass(const TriangleMesh& mesh, Boundary boundary) {
  std::vector<double> lumped(mesh.n_vertices(), 0.0);
  for (const Face& f : mesh.faces) {
    const double third =
        triangle_area(mesh.positions[f[0]], mesh.positions[f[1]], mesh.positions[f[2]]) / 3.0;
    for (int v : f)
      lumped[v] += third;
  }
  const std::vector<int> dofs = degrees_of_freedom(mesh, boundary);
  const auto m = static_cast<int>(dofs.size());
  SparseMatrix mass(m, m);
  mass.reserve(Eigen::VectorXi::Constant(m, 1));
  for (int k = 0; k < m; ++k)
    mass.insert(k, k) = lumped[dofs[k]];
  mass.makeCompressed();
  return mass;
}

OperatorPair assemble_operators(const TriangleMesh& mesh, Boundary boundary) {
  return {assemble_stiffness(mesh, boundary), assemble_lumped_mass(mesh, boundary),
          degrees_of_freedom(mesh, boundary)};
}

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  char buf[64];
  for (Eigen::Index j = 0; j < matrix.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(matrix, j); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << ' ' << j + 1 << ' ' << buf << '\n';
    }
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw Error(ErrorKind::Parse, "missing Matrix Market banner");
  const bool symmetric = line.find("symmetric") != std::string::npos;
  if (line.find("coordinate") == std::string::npos)
    throw Error(ErrorKind::Parse, "only coordinate Matrix Market files are supported");

  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  long long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream s(line);
    if (!(s >> rows >> cols >> nnz))
      throw Error(ErrorKind::Parse, "malformed Matrix Market size line");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols)
      throw Error(ErrorKind::Parse, "malformed Matrix Market entry " + std::to_string(k + 1));
    triplets.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (symmetric && i != j)
      triplets.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
  }
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

} // namespace hsim
