#pragma once

#include "hsim/hierarchy.hpp"
#include "hsim/mesh.hpp"
#include "hsim/operators.hpp"
#include "hsim/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsim {

// Everything the solvers need to know about one surface.
struct LaplaceProblem {
  TriangleMesh mesh;
  EdgeGraph graph;
  OperatorPair operators;
  double area = 0.0;
  Boundary boundary = Boundary::Neumann;
};

LaplaceProblem make_problem(TriangleMesh mesh, Boundary boundary = Boundary::Neumann);

struct HsimConfig {
  std::size_t p = 1;
  std::size_t levels = 0; // 0 selects default_level_count(p)
  double tolerance = 1e-2;
  double sigma = 7.0;
  double alpha = 0.1;
  std::uint64_t seed = 42;
  std::optional<int> start_vertex;
  std::size_t max_iterations = 50;
  bool double_step = true;
  bool locking = true;
  // Per-level locking schedules (coarse to fine, iterative levels only) from
  // a previous run; when set, every level runs exactly that schedule without
  // convergence tests.
  std::vector<std::vector<std::size_t>> replay;
};

struct LevelReport {
  std::size_t level = 0;
  std::size_t size = 0;
  bool dense = false;
  std::size_t iterations = 0;
  double shift = 0.0;
  double seconds = 0.0;
  std::vector<IterationTrace> trace;
};

struct HsimReport {
  // Coarsest level first.
  std::vector<LevelReport> levels;
  double hierarchy_seconds = 0.0;
  double solve_seconds = 0.0;

  // "F|2|1": F for the dense coarsest solve, then iterations per level down to
  // the finest. A plain subspace iteration run is just its iteration count.
  std::string iteration_string() const;
  std::size_t finest_iterations() const;
  double total_seconds() const { return hierarchy_seconds + solve_seconds; }
  // Locking schedule per iterative level, suitable for HsimConfig::replay.
  std::vector<std::vector<std::size_t>> replay_schedule() const;
};

struct HsimResult {
  EigenSolution solution;
  HsimReport report;
  std::size_t levels = 1;
};

// Hierarchical subspace iteration: dense solve on the coarsest level, then
// subspace iterations from coarse to fine, each started from the prolongated
// previous basis and shifted by an eigenvalue estimate of the previous level.
HsimResult hsim_solve(const LaplaceProblem& problem, const HsimConfig& config);

// Single-level subspace iteration from the heuristic initial basis without
// shift, on the same operators.
HsimResult sim_baseline_solve(const LaplaceProblem& problem, const HsimConfig& config);

} // namespace hsim
