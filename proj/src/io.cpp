#include "hsim/io.hpp"

#include "hsim/error.hpp"
#include "hsim/operators.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace hsim::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return in;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T> && sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char bytes[8];
  for (int k = 0; k < 8; ++k)
    bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8))
    throw Error(ErrorKind::Parse, "truncated HSEV file");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k)
    bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

} // namespace

void write_eigenvalues_csv(const std::filesystem::path& path, std::span<const EigenvalueRow> rows) {
  auto out = open_out(path);
  out << "index,eigenvalue,residual\n";
  char buf[96];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", row.index, row.eigenvalue, row.residual);
    out << buf;
  }
  if (!out)
    throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::vector<EigenvalueRow> read_eigenvalues_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "index,eigenvalue,residual")
    throw Error(ErrorKind::Parse, "'" + path.string() + "' lacks the eigenvalue CSV header");
  std::vector<EigenvalueRow> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    EigenvalueRow row{};
    char c1 = 0, c2 = 0;
    std::istringstream s(line);
    if (!(s >> row.index >> c1 >> row.eigenvalue >> c2 >> row.residual) || c1 != ',' || c2 != ',')
      throw Error(ErrorKind::Parse, "malformed eigenvalue row '" + line + "'");
    rows.push_back(row);
  }
  return rows;
}

void write_vectors_hsev(const std::filesystem::path& path, const Eigen::MatrixXd& vectors) {
  auto out = open_out(path, std::ios::binary);
  out.write("HSEV", 4);
  put_le(out, static_cast<std::uint64_t>(vectors.rows()));
  put_le(out, static_cast<std::uint64_t>(vectors.cols()));
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    for (Eigen::Index i = 0; i < vectors.rows(); ++i)
      put_le(out, vectors(i, j));
  if (!out)
    throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

Eigen::MatrixXd read_vectors_hsev(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "HSEV")
    throw Error(ErrorKind::Parse, "'" + path.string() + "' is not an HSEV file");
  const auto n = get_le<std::uint64_t>(in);
  const auto p = get_le<std::uint64_t>(in);
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    for (Eigen::Index i = 0; i < vectors.rows(); ++i)
      vectors(i, j) = get_le<double>(in);
  return vectors;
}

void write_index_list(const std::filesystem::path& path, std::span<const int> indices) {
  auto out = open_out(path);
  for (int v : indices)
    out << v << '\n';
}

std::vector<int> read_index_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<int> out;
  int v = 0;
  while (in >> v)
    out.push_back(v);
  if (!in.eof())
    throw Error(ErrorKind::Parse, "malformed index list '" + path.string() + "'");
  return out;
}

void write_matrix_market_file(const std::filesystem::path& path, const SparseMatrix& matrix) {
  auto out = open_out(path);
  write_matrix_market(out, matrix);
}

SparseMatrix read_matrix_market_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

} // namespace hsim::io
