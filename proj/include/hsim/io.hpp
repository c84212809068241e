#pragma once

#include "hsim/types.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace hsim::io {

struct EigenvalueRow {
  std::size_t index; // 0-based
  double eigenvalue;
  double residual;
};

// Header "index,eigenvalue,residual"; values printed with 17 significant
// digits so they parse back to the same doubles.
void write_eigenvalues_csv(const std::filesystem::path& path, std::span<const EigenvalueRow> rows);
std::vector<EigenvalueRow> read_eigenvalues_csv(const std::filesystem::path& path);

// Binary eigenvector file: magic "HSEV", u64 n, u64 p, then n*p little-endian
// doubles in column-major order.
void write_vectors_hsev(const std::filesystem::path& path, const Eigen::MatrixXd& vectors);
Eigen::MatrixXd read_vectors_hsev(const std::filesystem::path& path);

// One index per line.
void write_index_list(const std::filesystem::path& path, std::span<const int> indices);
std::vector<int> read_index_list(const std::filesystem::path& path);

void write_matrix_market_file(const std::filesystem::path& path, const SparseMatrix& matrix);
SparseMatrix read_matrix_market_file(const std::filesystem::path& path);

} // namespace hsim::io
