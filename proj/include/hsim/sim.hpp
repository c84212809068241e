#pragma once

#include "hsim/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hsim {

enum class NormMode {
  // ||v||_{M^-1} = sqrt(v^T M^-1 v); needs a diagonal M.
  MInverse,
  // Euclidean norm.
  Standard,
};

struct SimConfig {
  std::size_t p = 1;
  double tolerance = 1e-2;
  double shift = 0.0;
  NormMode norm = NormMode::MInverse;
  std::size_t max_iterations = 50;
  // Two inverse iterations per Rayleigh-Ritz projection.
  bool double_step = true;
  // Stop inverse iterations on the lowest pairs once their residual is below
  // tolerance / 10. Locked vectors still take part in every projection.
  bool locking = true;
  // When non-empty, run exactly this many iterations, locking the given
  // number of leading columns before each one, without convergence tests.
  // Used to time a run whose schedule was recorded earlier.
  std::vector<std::size_t> replay_locked;
};

struct IterationTrace {
  std::size_t iteration = 0;
  std::size_t converged = 0; // among the first p pairs
  std::size_t locked = 0;    // leading columns locked before the next iteration
  double max_residual = 0.0;
  double seconds = 0.0;
};

struct EigenSolution {
  Vector eigenvalues;       // ascending, length q; the first p are converged
  ColumnBlock eigenvectors; // n x q, M-orthonormal
  Vector residuals;         // first p pairs
  std::size_t iterations = 0;
  double shift = 0.0; // shift actually used for the factorization
  std::vector<IterationTrace> trace;
};

// max(ceil(1.5 p), p + 8)
std::size_t subspace_dimension(std::size_t p);

// Column 0 is diag(M), columns 1 ... q-2 are unit vectors at the q-2 rows
// with the smallest S_ii / M_ii (ties by row), and the last column is random.
ColumnBlock initial_basis(const SparseMatrix& s, const SparseMatrix& m, std::size_t q,
                          std::uint64_t seed);

// Relative residual ||S phi - lambda M phi|| / ||S phi|| in the chosen norm.
// When |lambda| <= zero_bound or S phi vanishes, the denominator is ||M phi||
// instead (the ratio is undefined for the constant kernel vector).
double residual(const SparseMatrix& s, const SparseMatrix& m, double lambda, const Vector& phi,
                NormMode mode, double zero_bound = 0.0);

// Subspace iteration with shift-invert block inverse iterations and
// Rayleigh-Ritz projections. The shifted matrix is factorized once.
EigenSolution sim_solve(const SparseMatrix& s, const SparseMatrix& m, const ColumnBlock& initial,
                        const SimConfig& config);

// Estimate at 1-based index max(1, floor(alpha * p)).
double choose_shift(std::span<const double> estimates, std::size_t p, double alpha);

} // namespace hsim
