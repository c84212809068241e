#include "hsim/hierarchy.hpp"

#include "hsim/error.hpp"
#include "hsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsim {

namespace {

// Drops the listed rows and columns; `keep_rows` / `keep_cols` are masks.
SparseMatrix select(const SparseMatrix& a, const std::vector<bool>& keep_rows,
                    const std::vector<bool>& keep_cols) {
  std::vector<int> new_row(keep_rows.size(), -1);
  int rows = 0;
  for (std::size_t i = 0; i < keep_rows.size(); ++i)
    if (keep_rows[i])
      new_row[i] = rows++;
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
  int cols = 0;
  for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
    if (!keep_cols[j])
      continue;
    for (SparseMatrix::InnerIterator it(a, j); it; ++it)
      if (new_row[it.row()] >= 0)
        triplets.emplace_back(new_row[it.row()], cols, it.value());
    ++cols;
  }
  SparseMatrix out(rows, cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

} // namespace

std::size_t coarsest_level_size(std::size_t p) {
  return std::max<std::size_t>((3 * p + 1) / 2, 1000);
}

std::size_t default_level_count(std::size_t p) { return p <= 200 ? 2 : 3; }

LevelPlan plan_levels(std::size_t n0, std::size_t p, std::size_t levels) {
  if (levels == 0 || p == 0)
    throw Error(ErrorKind::Usage, "level count and p must be at least 1");
  const std::size_t coarsest = coarsest_level_size(p);
  LevelPlan plan;
  if (levels == 1 || n0 <= coarsest) {
    plan.sizes = {n0};
    return plan;
  }

  plan.growth_rate = std::pow(static_cast<double>(n0) / static_cast<double>(coarsest),
                              1.0 / static_cast<double>(levels));
  // Coarse to fine, keeping only sizes strictly between their neighbours.
  std::vector<std::size_t> coarse_first = {coarsest};
  double previous = static_cast<double>(coarsest);
  for (std::size_t t = 1; t + 1 < levels; ++t) {
    const double size = std::round(plan.growth_rate * previous);
    previous = size;
    const auto s = static_cast<std::size_t>(size);
    if (s > coarse_first.back() && s < n0)
      coarse_first.push_back(s);
  }
  coarse_first.push_back(n0);
  plan.sizes.assign(coarse_first.rbegin(), coarse_first.rend());
  plan.levels = plan.sizes.size();
  return plan;
}

double support_radius(std::size_t level_size, double area, double sigma) {
  return std::sqrt(sigma * area / (static_cast<double>(level_size) * std::numbers::pi));
}

SparseMatrix build_prolongation(const EdgeGraph& graph, std::span<const int> fine_set,
                                std::span<const int> coarse_set, double rho) {
  const std::size_t n = graph.n_vertices();
  std::vector<int> row_of(n, -1);
  for (std::size_t r = 0; r < fine_set.size(); ++r)
    row_of[fine_set[r]] = static_cast<int>(r);

  // One truncated Dijkstra per coarse vertex gives a column of raw weights.
  const auto n_coarse = static_cast<std::ptrdiff_t>(coarse_set.size());
  std::vector<std::vector<std::pair<int, double>>> columns(coarse_set.size());
#pragma omp parallel
  {
    DijkstraWorkspace ws(n);
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t c = 0; c < n_coarse; ++c) {
      auto& column = columns[c];
      for (const VertexDistance& vd : ws.within(graph, coarse_set[c], rho)) {
        const int r = row_of[vd.vertex];
        const double w = 1.0 - vd.distance / rho;
        if (r >= 0 && w > 0.0)
          column.emplace_back(r, w);
      }
      std::sort(column.begin(), column.end());
    }
  }

  std::vector<double> row_sum(fine_set.size(), 0.0);
  for (const auto& column : columns)
    for (const auto& [r, w] : column)
      row_sum[r] += w;

  std::vector<int> uncovered;
  for (std::size_t r = 0; r < fine_set.size(); ++r)
    if (row_sum[r] == 0.0)
      uncovered.push_back(static_cast<int>(r));
  if (!uncovered.empty()) {
    const DistanceField nearest = multi_source_dijkstra(graph, coarse_set);
    for (int r : uncovered) {
      const int c = nearest.nearest[fine_set[r]];
      if (c < 0)
        throw Error(ErrorKind::Disconnected, "fine vertex unreachable from every coarse vertex");
      auto& column = columns[c];
      column.insert(std::lower_bound(column.begin(), column.end(), std::make_pair(r, 0.0)),
                    std::make_pair(r, 1.0));
      row_sum[r] = 1.0;
    }
  }

  SparseMatrix u(static_cast<Eigen::Index>(fine_set.size()),
                 static_cast<Eigen::Index>(coarse_set.size()));
  std::size_t nnz = 0;
  for (const auto& column : columns)
    nnz += column.size();
  u.reserve(static_cast<Eigen::Index>(nnz));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    u.startVec(static_cast<Eigen::Index>(c));
    for (const auto& [r, w] : columns[c])
      u.insertBack(r, static_cast<Eigen::Index>(c)) = w / row_sum[r];
  }
  u.finalize();
  return u;
}

SparseMatrix restrict_operator(const SparseMatrix& a, const SparseMatrix& u) {
  if (a.rows() != a.cols() || a.cols() != u.rows())
    throw Error(ErrorKind::Size, "restriction shapes do not conform");
  return kernels::galerkin_product(a, u);
}

ColumnBlock prolong_block(const SparseMatrix& u, const ColumnBlock& block) {
  if (u.cols() != block.rows())
    throw Error(ErrorKind::Size, "prolongation shapes do not conform");
  return kernels::sparse_times_block(u, block);
}

Hierarchy build_hierarchy(const EdgeGraph& graph, double area, const OperatorPair& fine,
                          const HierarchyOptions& options) {
  const std::size_t levels = options.levels ? options.levels : default_level_count(options.p);
  Hierarchy h;
  h.plan = plan_levels(static_cast<std::size_t>(fine.n()), options.p, levels);
  h.vertex_sets.push_back(fine.dofs);
  h.stiffness.push_back(fine.stiffness);
  h.mass.push_back(fine.mass);
  const std::size_t t_count = h.plan.levels;
  if (t_count == 1)
    return h;

  std::vector<std::size_t> coarse_first(h.plan.sizes.rbegin(), h.plan.sizes.rend() - 1);
  const VertexSampling sampling = farthest_point_sample(graph, coarse_first, options.start);
  for (std::size_t t = 1; t < t_count; ++t) {
    const auto prefix = sampling.level(t_count - 1 - t);
    h.vertex_sets.emplace_back(prefix.begin(), prefix.end());
  }

  for (std::size_t t = 0; t + 1 < t_count; ++t) {
    const double rho = support_radius(h.plan.sizes[t + 1], area, options.sigma);
    h.radii.push_back(rho);
    h.prolongations.push_back(build_prolongation(graph, h.vertex_sets[t], h.vertex_sets[t + 1], rho));
  }

  // With eliminated (Dirichlet) vertices some coarse functions can vanish on
  // every remaining fine row; drop them level by level.
  if (fine.dofs.size() != graph.n_vertices()) {
    for (std::size_t t = 0; t + 1 < t_count; ++t) {
      SparseMatrix& u = h.prolongations[t];
      std::vector<bool> keep(static_cast<std::size_t>(u.cols()), false);
      for (Eigen::Index j = 0; j < u.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(u, j); it; ++it)
          keep[j] = keep[j] || it.value() != 0.0;
      if (std::all_of(keep.begin(), keep.end(), [](bool k) { return k; }))
        continue;
      u = select(u, std::vector<bool>(static_cast<std::size_t>(u.rows()), true), keep);
      std::vector<int> kept;
      for (std::size_t k = 0; k < keep.size(); ++k)
        if (keep[k])
          kept.push_back(h.vertex_sets[t + 1][k]);
      h.vertex_sets[t + 1] = std::move(kept);
      if (t + 2 < t_count) {
        SparseMatrix& next = h.prolongations[t + 1];
        next = select(next, keep, std::vector<bool>(static_cast<std::size_t>(next.cols()), true));
      }
      h.plan.sizes[t + 1] = h.vertex_sets[t + 1].size();
    }
  }

  for (std::size_t t = 0; t + 1 < t_count; ++t) {
    h.stiffness.push_back(restrict_operator(h.stiffness[t], h.prolongations[t]));
    h.mass.push_back(restrict_operator(h.mass[t], h.prolongations[t]));
  }
  return h;
}

} // namespace hsim
