#include "hsim/sim.hpp"

#include "hsim/error.hpp"
#include "hsim/kernels.hpp"
#include "hsim/linalg.hpp"
#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>

namespace hsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Diagonal of M, or nothing when M has off-diagonal entries.
std::optional<Vector> diagonal_of(const SparseMatrix& m) {
  Vector d = Vector::Zero(m.rows());
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
      if (it.row() != j) {
        if (it.value() != 0.0)
          return std::nullopt;
      } else {
        d[j] = it.value();
      }
    }
  return d;
}

// Per-column norms in the requested norm; `inv_mass` is only read for MInverse.
Vector column_norms(const ColumnBlock& v, NormMode mode, const Vector& inv_mass) {
  Vector out(v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    out[c] = mode == NormMode::MInverse
                 ? std::sqrt(v.col(c).cwiseAbs2().dot(inv_mass))
                 : v.col(c).norm();
  return out;
}

Vector block_residuals(const ColumnBlock& s_phi, const ColumnBlock& m_phi, const Vector& lambda,
                       NormMode mode, const Vector& inv_mass, double zero_bound) {
  ColumnBlock r = s_phi;
  for (Eigen::Index c = 0; c < r.cols(); ++c)
    r.col(c) -= lambda[c] * m_phi.col(c);
  const Vector num = column_norms(r, mode, inv_mass);
  const Vector s_norm = column_norms(s_phi, mode, inv_mass);
  Vector out(r.cols());
  for (Eigen::Index c = 0; c < r.cols(); ++c) {
    double den = s_norm[c];
    if (std::abs(lambda[c]) <= zero_bound || den == 0.0)
      den = column_norms(m_phi.col(c), mode, inv_mass)[0];
    out[c] = num[c] / den;
  }
  return out;
}

// Mean of S_ii / M_ii: a cheap eigenvalue scale used to size shift
// perturbations.
double mean_diagonal_ratio(const SparseMatrix& s, const SparseMatrix& m) {
  const Vector sd = s.diagonal();
  const Vector md = m.diagonal();
  return (sd.array() / md.array()).mean();
}

LdltFactor factorize_shifted(const SparseMatrix& s, const SparseMatrix& m, double& shift) {
  try {
    return LdltFactor(SparseMatrix(s - shift * m));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularShift)
      throw;
  }
  shift = shift * (1.0 - 1e-4) - 1e-6 * mean_diagonal_ratio(s, m);
  return LdltFactor(SparseMatrix(s - shift * m));
}

// Makes x M-orthonormal and M-orthogonal to the (already M-orthonormal)
// locked columns, keeping span(fixed, x). Shift-invert with mu near an
// eigenvalue pulls every column towards that eigenvector, so plain column
// scaling would let the block lose rank in floating point.
void m_orthonormalize(ColumnBlock& x, const ColumnBlock& fixed, const SparseMatrix& m,
                      std::size_t iteration) {
  for (int pass = 0; pass < 2; ++pass) {
    if (fixed.cols() > 0) {
      const ColumnBlock m_fixed = kernels::sparse_times_block(m, fixed);
      x -= kernels::block_times_small(fixed, kernels::transpose_times(m_fixed, x));
    }
    const ColumnBlock mx = kernels::sparse_times_block(m, x);
    Eigen::MatrixXd gram = kernels::transpose_times(x, mx);
    gram = 0.5 * (gram + gram.transpose()).eval();
    const Eigen::LLT<Eigen::MatrixXd> chol(gram);
    if (chol.info() != Eigen::Success)
      throw Error(ErrorKind::RankCollapse, "inverse-iteration block lost linear independence at iteration " +
                                               std::to_string(iteration));
    const Eigen::MatrixXd r_inv = chol.matrixU().solve(
        Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
    x = kernels::block_times_small(x, r_inv);
  }
}

} // namespace

std::size_t subspace_dimension(std::size_t p) { return std::max((3 * p + 1) / 2, p + 8); }

ColumnBlock initial_basis(const SparseMatrix& s, const SparseMatrix& m, std::size_t q,
                          std::uint64_t seed) {
  const Eigen::Index n = s.rows();
  if (q == 0 || static_cast<Eigen::Index>(q) > n)
    throw Error(ErrorKind::Size, "subspace dimension " + std::to_string(q) +
                                     " outside [1, " + std::to_string(n) + "]");
  ColumnBlock basis = ColumnBlock::Zero(n, static_cast<Eigen::Index>(q));
  const Vector md = m.diagonal();
  basis.col(0) = md;
  if (q == 1)
    return basis;

  const Vector sd = s.diagonal();
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  const std::size_t units = q - 2;
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(units), rows.end(),
                    [&](int a, int b) {
                      const double ra = sd[a] / md[a], rb = sd[b] / md[b];
                      return ra < rb || (ra == rb && a < b);
                    });
  for (std::size_t k = 0; k < units; ++k)
    basis(rows[k], static_cast<Eigen::Index>(k + 1)) = 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    basis(i, static_cast<Eigen::Index>(q - 1)) = unit(rng);
  return basis;
}

double residual(const SparseMatrix& s, const SparseMatrix& m, double lambda, const Vector& phi,
                NormMode mode, double zero_bound) {
  Vector inv_mass;
  if (mode == NormMode::MInverse) {
    const auto d = diagonal_of(m);
    if (!d)
      throw Error(ErrorKind::Usage, "the M^-1 norm needs a diagonal mass matrix");
    inv_mass = d->cwiseInverse();
  }
  const ColumnBlock s_phi = s * phi;
  const ColumnBlock m_phi = m * phi;
  return block_residuals(s_phi, m_phi, Vector::Constant(1, lambda), mode, inv_mass, zero_bound)[0];
}

double choose_shift(std::span<const double> estimates, std::size_t p, double alpha) {
  if (alpha < 0.0 || alpha >= 0.5)
    throw Error(ErrorKind::Usage, "shift ratio must lie in [0, 0.5)");
  const auto index = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(alpha * p)));
  if (estimates.size() < p || index > estimates.size())
    throw Error(ErrorKind::Size, "need at least p eigenvalue estimates to pick a shift");
  return estimates[index - 1];
}

EigenSolution sim_solve(const SparseMatrix& s, const SparseMatrix& m, const ColumnBlock& initial,
                        const SimConfig& config) {
  const Eigen::Index n = s.rows();
  const Eigen::Index q = initial.cols();
  const auto p = static_cast<Eigen::Index>(config.p);
  if (s.cols() != n || m.rows() != n || m.cols() != n || initial.rows() != n)
    throw Error(ErrorKind::Size, "operator and basis shapes do not conform");
  if (p < 1 || p > q || q > n)
    throw Error(ErrorKind::Size, "need 1 <= p <= q <= n, got p=" + std::to_string(p) +
                                     " q=" + std::to_string(q) + " n=" + std::to_string(n));
  if (!(config.tolerance > 0.0))
    throw Error(ErrorKind::Usage, "tolerance must be positive");

  Vector inv_mass;
  if (config.norm == NormMode::MInverse) {
    const auto d = diagonal_of(m);
    if (!d)
      throw Error(ErrorKind::Usage, "the M^-1 norm needs a diagonal mass matrix");
    inv_mass = d->cwiseInverse();
  }

  EigenSolution sol;
  sol.shift = config.shift;
  const LdltFactor factor = factorize_shifted(s, m, sol.shift);

  const bool replay = !config.replay_locked.empty();
  const std::size_t max_iterations = replay ? config.replay_locked.size() : config.max_iterations;
  ColumnBlock phi = initial;
  Eigen::Index locked = 0;
  Vector lambda;

  for (std::size_t it = 1;; ++it) {
    const auto start = Clock::now();
    if (replay)
      locked = static_cast<Eigen::Index>(std::min<std::size_t>(config.replay_locked[it - 1], q));

    // Inverse iteration on the unlocked columns.
    ColumnBlock psi = phi;
    if (locked < q) {
      const Eigen::Index active = q - locked;
      const ColumnBlock fixed = phi.leftCols(locked);
      ColumnBlock x = factor.solve(kernels::sparse_times_block(m, phi.rightCols(active)));
      if (config.double_step) {
        m_orthonormalize(x, fixed, m, it);
        x = factor.solve(kernels::sparse_times_block(m, x));
      }
      m_orthonormalize(x, fixed, m, it);
      psi.rightCols(active) = x;
    }

    // Rayleigh-Ritz projection onto span(psi).
    const ColumnBlock s_psi = kernels::sparse_times_block(s, psi);
    const ColumnBlock m_psi = kernels::sparse_times_block(m, psi);
    Eigen::MatrixXd s_bar = kernels::transpose_times(psi, s_psi);
    Eigen::MatrixXd m_bar = kernels::transpose_times(psi, m_psi);
    s_bar = 0.5 * (s_bar + s_bar.transpose()).eval();
    m_bar = 0.5 * (m_bar + m_bar.transpose()).eval();
    DenseEigenpairs reduced;
    try {
      reduced = dense_generalized_eig(s_bar, m_bar);
    } catch (const Error& e) {
      throw Error(e.kind(), e.detail() + " at iteration " + std::to_string(it) +
                                " with " + std::to_string(locked) + " locked columns");
    }
    phi = kernels::block_times_small(psi, reduced.vectors);
    lambda = reduced.values;

    IterationTrace trace;
    trace.iteration = it;
    if (replay) {
      trace.seconds = seconds_since(start);
      sol.trace.push_back(trace);
      if (it >= max_iterations)
        break;
      continue;
    }

    const ColumnBlock lead = phi.leftCols(p);
    sol.residuals = block_residuals(kernels::sparse_times_block(s, lead),
                                    kernels::sparse_times_block(m, lead), lambda.head(p),
                                    config.norm, inv_mass, 1e-12 * std::abs(lambda[q - 1]));
    Eigen::Index converged = 0;
    for (Eigen::Index i = 0; i < p; ++i)
      converged += sol.residuals[i] < config.tolerance ? 1 : 0;
    if (config.locking) {
      locked = 0;
      while (locked < p && sol.residuals[locked] < 0.1 * config.tolerance)
        ++locked;
    }
    trace.converged = static_cast<std::size_t>(converged);
    trace.locked = static_cast<std::size_t>(locked);
    trace.max_residual = sol.residuals.maxCoeff();
    trace.seconds = seconds_since(start);
    sol.trace.push_back(trace);

    if (converged == p)
      break;
    if (it >= max_iterations)
      throw Error(ErrorKind::NoConvergence,
                  std::to_string(converged) + " of " + std::to_string(p) + " pairs converged after " +
                      std::to_string(it) + " iterations (max residual " +
                      std::to_string(trace.max_residual) + ")");
  }

  sol.iterations = sol.trace.size();
  if (replay) {
    const ColumnBlock lead = phi.leftCols(p);
    sol.residuals = block_residuals(kernels::sparse_times_block(s, lead),
                                    kernels::sparse_times_block(m, lead), lambda.head(p),
                                    config.norm, inv_mass, 1e-12 * std::abs(lambda[q - 1]));
  }
  sol.eigenvalues = std::move(lambda);
  sol.eigenvectors = std::move(phi);
  return sol;
}

} // namespace hsim
