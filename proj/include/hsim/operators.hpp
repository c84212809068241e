#pragma once

#include "hsim/mesh.hpp"
#include "hsim/types.hpp"

#include <iosfwd>
#include <vector>

namespace hsim {

enum class Boundary {
  // Natural boundary conditions; also the only meaningful mode for closed
  // surfaces.
  Neumann,
  // Zero values on boundary vertices, realized by deleting their rows and
  // columns.
  Dirichlet,
};

// Mesh vertex index of every degree of freedom, in row order. Identity for
// Neumann; the interior vertices in increasing order for Dirichlet.
std::vector<int> degrees_of_freedom(const TriangleMesh& mesh, Boundary boundary);

// Cotangent stiffness matrix: S_ij = -(cot a_ij + cot b_ij) / 2 for each
// edge, S_ii = -sum_j S_ij.
SparseMatrix assemble_stiffness(const TriangleMesh& mesh, Boundary boundary = Boundary::Neumann);

// Barycentric lumped mass: M_ii = area of incident triangles / 3.
SparseMatrix assemble_lumped_mass(const TriangleMesh& mesh, Boundary boundary = Boundary::Neumann);

struct OperatorPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
  std::vector<int> dofs;

  Eigen::Index n() const { return stiffness.rows(); }
};

OperatorPair assemble_operators(const TriangleMesh& mesh, Boundary boundary = Boundary::Neumann);

// Matrix Market "coordinate real general" with 1-based indices.
void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);
SparseMatrix read_matrix_market(std::istream& in);

} // namespace hsim
