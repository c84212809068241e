#include "hsim/oracle.hpp"

#include "hsim/error.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

namespace hsim::oracle {

ReferenceSpectrum dense_reference(const SparseMatrix& s, const SparseMatrix& m, std::size_t count) {
  const Eigen::Index n = s.rows();
  if (static_cast<std::size_t>(n) > kDenseReferenceCap)
    throw Error(ErrorKind::Size, "dense reference limited to " + std::to_string(kDenseReferenceCap) +
                                     " unknowns, got " + std::to_string(n));
  if (count == 0 || static_cast<Eigen::Index>(count) > n)
    throw Error(ErrorKind::Size, "requested reference pairs outside [1, n]");

  Eigen::MatrixXd a(s);
  Eigen::MatrixXd b(m);
  const auto nn = static_cast<lapack_int>(n);
  const auto k = static_cast<lapack_int>(count);
  lapack_int found = 0;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, k);
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, 'V', 'I', 'L', nn, a.data(), nn, b.data(), nn, 0.0, 0.0,
                     1, k, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), nn, ifail.data());
  if (info != 0 || found != k)
    throw Error(ErrorKind::RankCollapse,
                "reference eigensolver failed (info " + std::to_string(info) + ")");

  ReferenceSpectrum out;
  out.eigenvalues = w.head(k);
  out.vectors = std::move(z);
  out.provenance = Provenance::DenseFull;
  return out;
}

ReferenceSpectrum sphere_analytic(std::size_t count) {
  ReferenceSpectrum out;
  out.provenance = Provenance::AnalyticSphere;
  out.eigenvalues.resize(static_cast<Eigen::Index>(count));
  std::size_t filled = 0;
  for (std::size_t l = 0; filled < count; ++l)
    for (std::size_t k = 0; k < 2 * l + 1 && filled < count; ++k)
      out.eigenvalues[static_cast<Eigen::Index>(filled++)] = static_cast<double>(l * (l + 1));
  return out;
}

} // namespace hsim::oracle
