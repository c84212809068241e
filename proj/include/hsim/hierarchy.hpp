#pragma once

#include "hsim/mesh.hpp"
#include "hsim/operators.hpp"
#include "hsim/sampling.hpp"
#include "hsim/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hsim {

// max(ceil(1.5 p), 1000): size of the level that is solved densely.
std::size_t coarsest_level_size(std::size_t p);

// Two levels for p <= 200, three otherwise.
std::size_t default_level_count(std::size_t p);

struct LevelPlan {
  std::size_t levels = 1;
  // n^0 (finest) ... n^{T-1} (coarsest), strictly decreasing.
  std::vector<std::size_t> sizes;
  // Ratio between consecutive intermediate level sizes.
  double growth_rate = 1.0;
};

// The finest and coarsest sizes are fixed; intermediate sizes are
// round(growth_rate * n^{t+1}) with growth_rate = (n^0 / n^{T-1})^{1/T}.
// Collapses to a single level when the mesh is no larger than the coarsest
// target, and drops intermediate levels that would not be strictly between
// their neighbours.
LevelPlan plan_levels(std::size_t n0, std::size_t p, std::size_t levels);

// sqrt(sigma * area / (level_size * pi)): radius at which `level_size`
// geodesic disks cover the surface about sigma times.
double support_radius(std::size_t level_size, double area, double sigma);

// Prolongation from `coarse_set` to `fine_set` (both lists of mesh vertices).
// Entry (i, j) is 1 - d(fine_i, coarse_j) / rho for graph distance d < rho,
// then every row is scaled to sum to one. A row with no coarse vertex within
// rho gets a single 1 at its nearest coarse vertex.
SparseMatrix build_prolongation(const EdgeGraph& graph, std::span<const int> fine_set,
                                std::span<const int> coarse_set, double rho);

// U^T A U.
SparseMatrix restrict_operator(const SparseMatrix& a, const SparseMatrix& u);

// U * block.
ColumnBlock prolong_block(const SparseMatrix& u, const ColumnBlock& block);

struct HierarchyOptions {
  std::size_t p = 1;
  std::size_t levels = 0; // 0 selects default_level_count(p)
  double sigma = 7.0;
  SamplingStart start = SeededStart{42};
};

struct Hierarchy {
  LevelPlan plan;
  // Mesh vertex behind every row of level t; level 0 is the degrees of freedom
  // of the fine operators.
  std::vector<std::vector<int>> vertex_sets;
  // U^t maps level t+1 to level t, t = 0 ... T-2.
  std::vector<SparseMatrix> prolongations;
  // Support radius used to build U^t.
  std::vector<double> radii;
  std::vector<SparseMatrix> stiffness;
  std::vector<SparseMatrix> mass;

  std::size_t levels() const { return stiffness.size(); }
  std::size_t size(std::size_t level) const {
    return static_cast<std::size_t>(stiffness[level].rows());
  }
};

Hierarchy build_hierarchy(const EdgeGraph& graph, double area, const OperatorPair& fine,
                          const HierarchyOptions& options);

} // namespace hsim
