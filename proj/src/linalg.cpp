#include "hsim/linalg.hpp"

#include "hsim/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace hsim {

namespace {

constexpr Eigen::Index kPanel = 16;

using EigenLdlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

} // namespace

struct LdltFactor::Impl {
  EigenLdlt ldlt;
  // Strictly lower unit factor in compressed column form.
  const int* outer = nullptr;
  const int* inner = nullptr;
  const double* values = nullptr;
  Vector inverse_diagonal;
  Eigen::VectorXi permutation;         // row i of b goes to row permutation[i]
  Eigen::VectorXi inverse_permutation; // row i of the solution goes to inverse_permutation[i]

  void solve_panel(const ColumnBlock& b, Eigen::Index first, Eigen::Index width, ColumnBlock& x,
                   std::vector<double>& panel) const;
};

LdltFactor::LdltFactor(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::Size, "LDL^T needs a square matrix");
  Impl& f = *impl_;
  f.ldlt.compute(a);

  const Vector& d = f.ldlt.vectorD();
  double largest = 0.0;
  bool finite = true;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    finite = finite && std::isfinite(d[i]);
    largest = std::max(largest, std::abs(d[i]));
  }
  if (f.ldlt.info() != Eigen::Success || !finite)
    throw Error(ErrorKind::SingularShift, "LDL^T factorization broke down");
  // Rounding errors in the pivots grow roughly with n * eps * max|d|; a pivot
  // below that level is indistinguishable from zero.
  const double tolerance = std::max(static_cast<double>(d.size()), 10.0) *
                           std::numeric_limits<double>::epsilon() * largest;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (std::abs(d[i]) <= tolerance)
      throw Error(ErrorKind::SingularShift,
                  "pivot " + std::to_string(i) + " vanishes to working precision");

  const auto& l = f.ldlt.matrixL().nestedExpression();
  f.outer = l.outerIndexPtr();
  f.inner = l.innerIndexPtr();
  f.values = l.valuePtr();
  f.inverse_diagonal = d.cwiseInverse();
  f.permutation = f.ldlt.permutationP().indices();
  f.inverse_permutation = f.ldlt.permutationPinv().indices();
}

LdltFactor::~LdltFactor() = default;
LdltFactor::LdltFactor(LdltFactor&&) noexcept = default;
LdltFactor& LdltFactor::operator=(LdltFactor&&) noexcept = default;

Eigen::Index LdltFactor::rows() const { return impl_->inverse_diagonal.size(); }

Eigen::Index LdltFactor::factor_nonzeros() const {
  return impl_->ldlt.matrixL().nestedExpression().nonZeros();
}

Eigen::Index LdltFactor::negative_pivots() const {
  return (impl_->ldlt.vectorD().array() < 0.0).count();
}

// The panel is row-major n x kPanel so that each update touches one
// contiguous run of kPanel values. Unused lanes are zero.
void LdltFactor::Impl::solve_panel(const ColumnBlock& b, Eigen::Index first, Eigen::Index width,
                                   ColumnBlock& x, std::vector<double>& panel) const {
  const Eigen::Index n = inverse_diagonal.size();
  std::fill(panel.begin(), panel.end(), 0.0);
  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index i = 0; i < n; ++i)
      panel[permutation[i] * kPanel + c] = b(i, first + c);

  for (Eigen::Index j = 0; j < n; ++j) {
    const double* xj = &panel[j * kPanel];
    for (int p = outer[j]; p < outer[j + 1]; ++p) {
      double* xi = &panel[static_cast<Eigen::Index>(inner[p]) * kPanel];
      const double lij = values[p];
      for (Eigen::Index c = 0; c < kPanel; ++c)
        xi[c] -= lij * xj[c];
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double* xj = &panel[j * kPanel];
    const double dinv = inverse_diagonal[j];
    for (Eigen::Index c = 0; c < kPanel; ++c)
      xj[c] = dinv * xj[c];
  }
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    std::array<double, kPanel> acc;
    std::copy_n(&panel[j * kPanel], kPanel, acc.begin());
    for (int p = outer[j]; p < outer[j + 1]; ++p) {
      const double* xi = &panel[static_cast<Eigen::Index>(inner[p]) * kPanel];
      const double lij = values[p];
      for (Eigen::Index c = 0; c < kPanel; ++c)
        acc[c] -= lij * xi[c];
    }
    std::copy_n(acc.begin(), kPanel, &panel[j * kPanel]);
  }

  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index i = 0; i < n; ++i)
      x(inverse_permutation[i], first + c) = panel[i * kPanel + c];
}

ColumnBlock LdltFactor::solve(const ColumnBlock& b) const {
  if (b.rows() != rows())
    throw Error(ErrorKind::Size, "right-hand side has the wrong number of rows");
  ColumnBlock x(b.rows(), b.cols());
  const Eigen::Index panels = (b.cols() + kPanel - 1) / kPanel;
#pragma omp parallel
  {
    std::vector<double> panel(static_cast<std::size_t>(rows() * kPanel));
#pragma omp for schedule(dynamic)
    for (Eigen::Index k = 0; k < panels; ++k) {
      const Eigen::Index first = k * kPanel;
      impl_->solve_panel(b, first, std::min(kPanel, b.cols() - first), x, panel);
    }
  }
  return x;
}

Vector LdltFactor::solve(const Vector& b) const {
  ColumnBlock block = b;
  return solve(block).col(0);
}

ColumnBlock LdltFactor::solve_serial(const ColumnBlock& b) const {
  ColumnBlock x(b.rows(), b.cols());
  for (Eigen::Index c = 0; c < b.cols(); ++c)
    x.col(c) = impl_->ldlt.solve(b.col(c));
  return x;
}

DenseEigenpairs dense_generalized_eig(const Eigen::MatrixXd& s, const Eigen::MatrixXd& m) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n || m.rows() != n || m.cols() != n)
    throw Error(ErrorKind::Size, "dense eigenproblem needs two square matrices of equal size");

  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> chol(m);
  if (chol.info() != Eigen::Success)
    throw Error(ErrorKind::RankCollapse,
                "reduced mass matrix is not positive definite (basis lost linear independence)");
  const auto l = chol.matrixL();

  // C = L^{-1} S L^{-T}
  Eigen::MatrixXd c = s.selfadjointView<Eigen::Lower>();
  l.solveInPlace(c);
  c.transposeInPlace();
  l.solveInPlace(c);
  c = 0.5 * (c + c.transpose()).eval();

  DenseEigenpairs out;
  out.values.resize(n);
  if (n > 0) {
    // The symmetric solve runs single-threaded so that results never depend on
    // the BLAS thread pool.
    openblas_set_num_threads(1);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                           c.data(), static_cast<lapack_int>(n), out.values.data());
    if (info != 0)
      throw Error(ErrorKind::RankCollapse,
                  "dense symmetric eigensolver failed (info " + std::to_string(info) + ")");
  }
  l.transpose().solveInPlace(c);
  out.vectors = std::move(c);
  return out;
}

} // namespace hsim
