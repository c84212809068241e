#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hsim {

// Symmetric sparse matrices are stored with both triangles present so that
// products and transposes need no special casing. Column-major, int indices.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Dense n x q block of basis vectors, one vector per column.
using ColumnBlock = Eigen::MatrixXd;

using Vector = Eigen::VectorXd;

} // namespace hsim
