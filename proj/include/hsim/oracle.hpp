#pragma once

#include "hsim/types.hpp"

#include <cstddef>

// Reference spectra for verification. Deliberately independent of the solver
// code paths: the dense reference goes through LAPACK's expert generalized
// driver (bisection and inverse iteration on the tridiagonal form) rather than
// the divide-and-conquer route used inside the solvers.
namespace hsim::oracle {

enum class Provenance { DenseFull, AnalyticSphere };

struct ReferenceSpectrum {
  Vector eigenvalues;      // ascending
  Eigen::MatrixXd vectors; // M-orthonormal columns; empty for analytic spectra
  Provenance provenance = Provenance::DenseFull;
};

inline constexpr std::size_t kDenseReferenceCap = 5000;

// Lowest `count` pairs of S x = lambda M x, for n <= kDenseReferenceCap.
ReferenceSpectrum dense_reference(const SparseMatrix& s, const SparseMatrix& m, std::size_t count);

// Unit-sphere Laplace-Beltrami spectrum: l (l + 1) with multiplicity 2 l + 1,
// truncated to `count` values.
ReferenceSpectrum sphere_analytic(std::size_t count);

} // namespace hsim::oracle
