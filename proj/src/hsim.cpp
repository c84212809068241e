#include "hsim/hsim.hpp"

#include "hsim/error.hpp"
#include "hsim/linalg.hpp"

#include <chrono>

namespace hsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Error annotate(const Error& e, std::size_t level) {
  return Error(e.kind(), "level " + std::to_string(level) + ": " + e.detail());
}

std::vector<std::size_t> schedule_of(const std::vector<IterationTrace>& trace) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < trace.size(); ++k)
    out.push_back(k == 0 ? 0 : trace[k - 1].locked);
  return out;
}

void check_config(const LaplaceProblem& problem, const HsimConfig& config) {
  if (config.p == 0)
    throw Error(ErrorKind::Usage, "p must be at least 1");
  if (config.p > static_cast<std::size_t>(problem.operators.n()))
    throw Error(ErrorKind::Size, "p=" + std::to_string(config.p) + " exceeds the " +
                                     std::to_string(problem.operators.n()) + " degrees of freedom");
  if (!(config.tolerance > 0.0))
    throw Error(ErrorKind::Usage, "tolerance must be positive");
  if (!(config.sigma > 0.0))
    throw Error(ErrorKind::Usage, "sigma must be positive");
}

} // namespace

LaplaceProblem make_problem(TriangleMesh mesh, Boundary boundary) {
  LaplaceProblem problem;
  problem.graph = build_edge_graph(mesh);
  problem.operators = assemble_operators(mesh, boundary);
  problem.area = surface_area(mesh);
  problem.boundary = boundary;
  problem.mesh = std::move(mesh);
  return problem;
}

std::string HsimReport::iteration_string() const {
  std::string out;
  for (const LevelReport& level : levels) {
    if (!out.empty())
      out += '|';
    out += level.dense ? "F" : std::to_string(level.iterations);
  }
  return out;
}

std::size_t HsimReport::finest_iterations() const {
  return levels.empty() ? 0 : levels.back().iterations;
}

std::vector<std::vector<std::size_t>> HsimReport::replay_schedule() const {
  std::vector<std::vector<std::size_t>> out;
  for (const LevelReport& level : levels)
    if (!level.dense)
      out.push_back(schedule_of(level.trace));
  return out;
}

HsimResult hsim_solve(const LaplaceProblem& problem, const HsimConfig& config) {
  check_config(problem, config);
  HsimResult result;

  auto start = Clock::now();
  HierarchyOptions options;
  options.p = config.p;
  options.levels = config.levels;
  options.sigma = config.sigma;
  options.start = config.start_vertex ? SamplingStart{FixedStart{*config.start_vertex}}
                                      : SamplingStart{SeededStart{config.seed}};
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  result.report.hierarchy_seconds = seconds_since(start);
  result.levels = h.levels();

  start = Clock::now();
  const std::size_t coarsest = h.levels() - 1;
  const std::size_t q = std::min(subspace_dimension(config.p), h.size(coarsest));

  // Full dense solve of the coarsest level.
  auto level_start = Clock::now();
  DenseEigenpairs dense;
  try {
    dense = dense_generalized_eig(Eigen::MatrixXd(h.stiffness[coarsest]),
                                  Eigen::MatrixXd(h.mass[coarsest]));
  } catch (const Error& e) {
    throw annotate(e, coarsest);
  }
  EigenSolution current;
  current.eigenvalues = dense.values.head(static_cast<Eigen::Index>(q));
  current.eigenvectors = dense.vectors.leftCols(static_cast<Eigen::Index>(q));
  {
    LevelReport report;
    report.level = coarsest;
    report.size = h.size(coarsest);
    report.dense = true;
    report.seconds = seconds_since(level_start);
    result.report.levels.push_back(report);
  }

  std::size_t replay_index = 0;
  for (std::size_t t = coarsest; t-- > 0;) {
    level_start = Clock::now();
    const ColumnBlock initial = prolong_block(h.prolongations[t], current.eigenvectors);
    SimConfig sim;
    sim.p = config.p;
    sim.tolerance = config.tolerance;
    sim.shift = choose_shift({current.eigenvalues.data(), static_cast<std::size_t>(current.eigenvalues.size())},
                             config.p, config.alpha);
    sim.norm = t == 0 ? NormMode::MInverse : NormMode::Standard;
    sim.max_iterations = config.max_iterations;
    sim.double_step = config.double_step;
    sim.locking = config.locking;
    if (replay_index < config.replay.size())
      sim.replay_locked = config.replay[replay_index++];
    try {
      current = sim_solve(h.stiffness[t], h.mass[t], initial, sim);
    } catch (const Error& e) {
      throw annotate(e, t);
    }
    LevelReport report;
    report.level = t;
    report.size = h.size(t);
    report.iterations = current.iterations;
    report.shift = current.shift;
    report.seconds = seconds_since(level_start);
    report.trace = current.trace;
    result.report.levels.push_back(std::move(report));
  }

  if (coarsest == 0) {
    // Single dense level: report residuals of the exact pairs.
    const auto p = static_cast<Eigen::Index>(config.p);
    const double zero_bound = 1e-12 * std::abs(current.eigenvalues[current.eigenvalues.size() - 1]);
    current.residuals.resize(p);
    for (Eigen::Index i = 0; i < p; ++i)
      current.residuals[i] = residual(h.stiffness[0], h.mass[0], current.eigenvalues[i],
                                      current.eigenvectors.col(i), NormMode::MInverse, zero_bound);
  }
  result.report.solve_seconds = seconds_since(start);
  result.solution = std::move(current);
  return result;
}

HsimResult sim_baseline_solve(const LaplaceProblem& problem, const HsimConfig& config) {
  check_config(problem, config);
  HsimResult result;
  const SparseMatrix& s = problem.operators.stiffness;
  const SparseMatrix& m = problem.operators.mass;
  const auto start = Clock::now();
  const std::size_t q = std::min(subspace_dimension(config.p), static_cast<std::size_t>(s.rows()));
  SimConfig sim;
  sim.p = config.p;
  sim.tolerance = config.tolerance;
  sim.shift = 0.0;
  sim.norm = NormMode::MInverse;
  sim.max_iterations = config.max_iterations;
  sim.double_step = config.double_step;
  sim.locking = config.locking;
  if (!config.replay.empty())
    sim.replay_locked = config.replay.front();
  result.solution = sim_solve(s, m, initial_basis(s, m, q, config.seed), sim);

  LevelReport report;
  report.size = static_cast<std::size_t>(s.rows());
  report.iterations = result.solution.iterations;
  report.shift = result.solution.shift;
  report.trace = result.solution.trace;
  report.seconds = seconds_since(start);
  result.report.levels.push_back(std::move(report));
  result.report.solve_seconds = seconds_since(start);
  return result;
}

} // namespace hsim
