// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Pass criterion numbers as arguments
// to run a subset.

#include "hsim/cli.hpp"
#include "hsim/hierarchy.hpp"
#include "hsim/hsim.hpp"
#include "hsim/io.hpp"
#include "hsim/oracle.hpp"
#include "hsim/shapes.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hsim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "hsim_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path mesh_file(const std::string& name, const std::function<TriangleMesh()>& make) {
  const fs::path p = work_dir() / (name + ".off");
  if (!fs::exists(p))
    save_off(p, make());
  return p;
}

TriangleMesh sphere10k() { return shapes::icosphere(5); }
TriangleMesh large_mesh() { return shapes::bumpy(shapes::cube_sphere(92), 0.1); }
TriangleMesh disk_mesh() { return shapes::hex_disk(40); }

struct SmallCase {
  std::string name;
  std::function<TriangleMesh()> make;
};

std::vector<SmallCase> small_cases() {
  return {{"torus", [] { return shapes::jitter(shapes::torus(60, 25), 0.2, 7); }},
          {"bumpy cube-sphere", [] { return shapes::bumpy(shapes::cube_sphere(18), 0.2); }},
          {"disk", [] { return shapes::jitter(shapes::hex_disk(25), 0.15, 9); }}};
}

// Relative residuals computed from scratch: ||S v - l M v||_{M^-1} / ||S v||_{M^-1},
// with ||M v||_{M^-1} in the denominator for the (near-)zero eigenvalue.
std::vector<double> recompute_residuals(const OperatorPair& ops, const std::vector<io::EigenvalueRow>& rows,
                                        const Eigen::MatrixXd& full_vectors) {
  Eigen::MatrixXd v(ops.n(), full_vectors.cols());
  for (std::size_t k = 0; k < ops.dofs.size(); ++k)
    v.row(static_cast<Eigen::Index>(k)) = full_vectors.row(ops.dofs[k]);
  const Eigen::VectorXd mdiag = ops.mass.diagonal();
  const double largest = std::abs(rows.back().eigenvalue);
  std::vector<double> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::VectorXd x = v.col(static_cast<Eigen::Index>(i));
    const Eigen::VectorXd sx = ops.stiffness * x;
    const Eigen::VectorXd mx = mdiag.cwiseProduct(x);
    const Eigen::VectorXd r = sx - rows[i].eigenvalue * mx;
    auto minv_norm = [&](const Eigen::VectorXd& y) { return std::sqrt(y.cwiseAbs2().cwiseQuotient(mdiag).sum()); };
    const bool zero = std::abs(rows[i].eigenvalue) <= 1e-12 * largest;
    out.push_back(minv_norm(r) / (zero ? minv_norm(mx) : minv_norm(sx)));
  }
  return out;
}

struct CliRun {
  int status = -1;
  std::vector<io::EigenvalueRow> rows;
  Eigen::MatrixXd vectors;
  nlohmann::json record;
  fs::path dir;
};

CliRun run_eigs(const std::string& tag, std::vector<std::string> args) {
  CliRun r;
  r.dir = work_dir() / tag;
  args.insert(args.begin(), "eigs");
  args.insert(args.end(), {"--out", r.dir.string(), "--export-vectors"});
  r.status = cli::run(args);
  if (r.status == 0) {
    r.rows = io::read_eigenvalues_csv(r.dir / "eigenvalues.csv");
    r.vectors = io::read_vectors_hsev(r.dir / "eigenvectors.hsev");
    std::ifstream in(r.dir / "run.json");
    r.record = nlohmann::json::parse(in);
  }
  return r;
}

// Checks every returned pair against eps both as reported and recomputed.
void check_residual_contract(Outcome& o, const std::string& label, const CliRun& run, const OperatorPair& ops,
                             double eps, std::size_t p) {
  o.require(run.status == 0, label + " exit status " + std::to_string(run.status));
  if (run.status != 0)
    return;
  o.require(run.rows.size() == p, label + " row count");
  const auto fresh = recompute_residuals(ops, run.rows, run.vectors.leftCols(static_cast<Eigen::Index>(run.rows.size())));
  double worst = 0.0;
  for (std::size_t i = 0; i < run.rows.size(); ++i) {
    worst = std::max({worst, fresh[i], run.rows[i].residual});
    o.require(run.rows[i].residual < eps, label + " reported residual " + std::to_string(i));
    o.require(fresh[i] < eps, label + " recomputed residual " + std::to_string(i) + " = " + fmt(fresh[i]));
  }
  o.note(label + " max residual " + fmt(worst));
}

Outcome criterion_residual_contract() {
  Outcome o;
  const fs::path mesh = mesh_file("sphere10k", sphere10k);
  const OperatorPair ops = assemble_operators(load_mesh(mesh));
  for (const char* solver : {"hsim", "sim"})
    for (const char* eps : {"1e-2", "1e-4", "1e-6"}) {
      const std::string label = std::string(solver) + " eps=" + eps;
      const CliRun run = run_eigs(std::string("c1_") + solver + eps,
                                  {"--mesh", mesh.string(), "--p", "50", "--eps", eps, "--solver", solver});
      check_residual_contract(o, label, run, ops, std::stod(eps), 50);
    }
  return o;
}

Outcome criterion_analytic_sphere() {
  Outcome o;
  const fs::path mesh = mesh_file("sphere10k", sphere10k);
  const auto start = Clock::now();
  const CliRun run = run_eigs("c2", {"--mesh", mesh.string(), "--p", "100", "--eps", "1e-2"});
  const double elapsed = seconds_since(start);
  o.require(run.status == 0, "exit status");
  if (run.status != 0)
    return o;
  const auto analytic = oracle::sphere_analytic(100).eigenvalues;
  std::vector<double> lambda;
  for (const auto& r : run.rows)
    lambda.push_back(r.eigenvalue);
  o.require(std::abs(lambda[0]) < 1e-8 * lambda[1], "lambda_1 = " + fmt(lambda[0]) + " not below 1e-8 lambda_2");
  double worst_l1 = 0, worst_l2 = 0, worst_all = 0;
  for (int i = 1; i <= 3; ++i)
    worst_l1 = std::max(worst_l1, std::abs(lambda[i] - 2.0) / 2.0);
  for (int i = 4; i <= 8; ++i)
    worst_l2 = std::max(worst_l2, std::abs(lambda[i] - 6.0) / 6.0);
  for (int i = 1; i < 100; ++i)
    worst_all = std::max(worst_all, std::abs(lambda[i] - analytic[i]) / analytic[i]);
  o.require(worst_l1 < 0.03, "eigenvalues 2-4 off by " + fmt(worst_l1));
  o.require(worst_l2 < 0.03, "eigenvalues 5-9 off by " + fmt(worst_l2));
  o.require(worst_all < 5e-2, "relative error " + fmt(worst_all));
  o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  o.note("n=" + std::to_string(run.vectors.rows()) + ", iterations " + run.record["iterations"].get<std::string>() +
         ", lambda_1=" + fmt(lambda[0]) + ", max rel err (l=1) " + fmt(worst_l1) + ", (l=2) " + fmt(worst_l2) +
         ", all 100 " + fmt(worst_all) + ", " + fmt(elapsed) + " s");
  return o;
}

// Largest principal angle between two M-orthonormal bases.
double principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& mdiag) {
  const Eigen::MatrixXd c = a.transpose() * mdiag.asDiagonal() * b;
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(c).singularValues();
  return std::acos(std::clamp(s.minCoeff(), -1.0, 1.0));
}

Outcome criterion_oracle_equivalence() {
  Outcome o;
  const auto start = Clock::now();
  const std::size_t p = 50;
  for (const SmallCase& c : small_cases()) {
    const LaplaceProblem problem = make_problem(c.make());
    const auto& ops = problem.operators;
    HsimConfig config;
    config.p = p;
    config.tolerance = 1e-8;
    const HsimResult h = hsim_solve(problem, config);
    const HsimResult s = sim_baseline_solve(problem, config);
    const auto ref = oracle::dense_reference(ops.stiffness, ops.mass, p + 1);
    const Eigen::VectorXd mdiag = ops.mass.diagonal();
    double worst_value = 0.0, worst_angle = 0.0;
    std::size_t worst_index = 0;
    // The kernel eigenvalue is zero up to roundoff, so its deviation is taken
    // relative to the first non-zero eigenvalue instead.
    for (std::size_t i = 0; i < p; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double denom = std::max(std::abs(ref.eigenvalues[k]), ref.eigenvalues[1]);
      const double dev = std::max(std::abs(h.solution.eigenvalues[k] - ref.eigenvalues[k]),
                                  std::abs(s.solution.eigenvalues[k] - ref.eigenvalues[k])) / denom;
      if (dev > worst_value) {
        worst_value = dev;
        worst_index = i;
      }
    }
    // Eigenspaces are compared cluster by cluster; clusters are split at
    // relative gaps above 1e-6, and the cut at p must fall in such a gap.
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= p; ++i) {
      const double a = ref.eigenvalues[static_cast<Eigen::Index>(i) - 1], b = ref.eigenvalues[static_cast<Eigen::Index>(i)];
      if (b - a <= 1e-6 * std::max(std::abs(b), 1.0))
        continue;
      const auto lo = static_cast<Eigen::Index>(begin), len = static_cast<Eigen::Index>(i - begin);
      const Eigen::MatrixXd r = ref.vectors.middleCols(lo, len);
      worst_angle = std::max({worst_angle, principal_angle(r, h.solution.eigenvectors.middleCols(lo, len), mdiag),
                              principal_angle(r, s.solution.eigenvectors.middleCols(lo, len), mdiag)});
      begin = i;
    }
    o.require(begin == p, c.name + ": eigenvalue cluster straddles index " + std::to_string(p));
    o.require(worst_value < 1e-6, c.name + " eigenvalue deviation " + fmt(worst_value));
    o.require(worst_angle < 1e-3, c.name + " principal angle " + fmt(worst_angle));
    o.note(c.name + " (n=" + std::to_string(ops.n()) + ", hsim " + h.report.iteration_string() + ", sim " +
           s.report.iteration_string() + "): rel dev " + fmt(worst_value) + " at " + std::to_string(worst_index) + ", angle " + fmt(worst_angle));
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
  o.note(fmt(elapsed) + " s");
  return o;
}

struct TimedRun {
  HsimResult result;
  double seconds = 0.0;
};

// Converge once with convergence tests, then time a replay of the recorded
// schedule without them.
TimedRun timed_solve(const LaplaceProblem& problem, HsimConfig config, bool baseline) {
  auto solve = [&](const HsimConfig& c) { return baseline ? sim_baseline_solve(problem, c) : hsim_solve(problem, c); };
  TimedRun run;
  run.result = solve(config);
  config.replay = run.result.report.replay_schedule();
  const HsimResult replay = solve(config);
  run.seconds = replay.report.total_seconds();
  return run;
}

Outcome criterion_iteration_reduction() {
  Outcome o;
  const LaplaceProblem problem = make_problem(load_mesh(mesh_file("large", large_mesh)));
  HsimConfig config;
  config.p = 250;
  config.tolerance = 1e-2;
  config.levels = 3;
  const TimedRun h = timed_solve(problem, config, false);
  const TimedRun s = timed_solve(problem, config, true);
  const std::size_t h_iters = h.result.report.finest_iterations();
  const std::size_t s_iters = s.result.solution.iterations;
  o.require(problem.operators.n() >= 50000, "mesh too small");
  o.require(h.result.levels == 3, "levels " + std::to_string(h.result.levels));
  o.require(h_iters <= 2, "HSIM finest iterations " + std::to_string(h_iters));
  o.require(s_iters >= 4, "SIM iterations " + std::to_string(s_iters));
  o.require(h.seconds <= 0.5 * s.seconds, "time ratio " + fmt(h.seconds / s.seconds));
  o.note("n=" + std::to_string(problem.operators.n()) + ", HSIM " + h.result.report.iteration_string() + " in " +
         fmt(h.seconds) + " s (hierarchy " + fmt(h.result.report.hierarchy_seconds) + " s), SIM " +
         std::to_string(s_iters) + " in " + fmt(s.seconds) + " s, ratio " + fmt(h.seconds / s.seconds));
  return o;
}

void check_hierarchy(Outcome& o, const std::string& name, const TriangleMesh& mesh, std::size_t p,
                     std::size_t levels, double sigma) {
  const LaplaceProblem problem = make_problem(mesh);
  HierarchyOptions options;
  options.p = p;
  options.levels = levels;
  options.sigma = sigma;
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  const std::size_t n0 = mesh.n_vertices();
  const std::size_t coarsest = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(p))), 1000);
  std::string sizes;
  double worst_row = 0, worst_kernel = 0, min_nnz = 1e300, max_nnz = 0;
  for (std::size_t t = 0; t < h.levels(); ++t) {
    sizes += (t ? "/" : "") + std::to_string(h.size(t));
    const Eigen::VectorXd s1 = h.stiffness[t] * Eigen::VectorXd::Ones(h.stiffness[t].cols());
    worst_kernel = std::max(worst_kernel, s1.cwiseAbs().maxCoeff());
    if (t > 0)
      o.require(h.size(t) < h.size(t - 1), name + " sizes not strictly decreasing");
  }
  o.require(h.size(0) == n0, name + " finest size");
  if (n0 > coarsest)
    o.require(h.size(h.levels() - 1) == coarsest, name + " coarsest size " + std::to_string(h.size(h.levels() - 1)));
  for (std::size_t t = 0; t + 1 < h.levels(); ++t) {
    const SparseMatrix& u = h.prolongations[t];
    const Eigen::VectorXd rows = u * Eigen::VectorXd::Ones(u.cols());
    worst_row = std::max(worst_row, (rows.array() - 1.0).abs().maxCoeff());
    const double nnz = static_cast<double>(u.nonZeros()) / static_cast<double>(u.rows());
    min_nnz = std::min(min_nnz, nnz);
    max_nnz = std::max(max_nnz, nnz);
  }
  o.require(worst_row <= 1e-12, name + " row sum deviation " + fmt(worst_row));
  o.require(worst_kernel <= 1e-10, name + " |S 1| = " + fmt(worst_kernel));
  if (h.levels() > 1)
    o.require(min_nnz >= sigma - 4 && max_nnz <= sigma + 4,
              name + " mean nnz/row in [" + fmt(min_nnz) + ", " + fmt(max_nnz) + "]");
  o.note(name + " " + sizes + " nnz/row " + fmt(min_nnz) + ".." + fmt(max_nnz));
}

Outcome criterion_hierarchy_invariants() {
  Outcome o;
  check_hierarchy(o, "sphere10k", load_mesh(mesh_file("sphere10k", sphere10k)), 100, 2, 7.0);
  check_hierarchy(o, "sphere10k T=3", load_mesh(mesh_file("sphere10k", sphere10k)), 50, 3, 7.0);
  for (const SmallCase& c : small_cases())
    check_hierarchy(o, c.name, c.make(), 50, 2, 7.0);
  check_hierarchy(o, "large T=3", load_mesh(mesh_file("large", large_mesh)), 250, 3, 7.0);
  check_hierarchy(o, "disk", load_mesh(mesh_file("disk", disk_mesh)), 50, 2, 7.0);
  return o;
}

Outcome criterion_tolerance_scaling() {
  Outcome o;
  const LaplaceProblem problem = make_problem(load_mesh(mesh_file("large", large_mesh)));
  std::vector<std::size_t> iterations;
  std::string series;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    HsimConfig config;
    config.p = 100;
    config.tolerance = eps;
    const HsimResult r = hsim_solve(problem, config);
    iterations.push_back(r.report.finest_iterations());
    series += (series.empty() ? "" : ", ") + fmt(eps, "%.0e") + ":" + r.report.iteration_string();
  }
  for (std::size_t k = 1; k < iterations.size(); ++k)
    o.require(iterations[k] <= iterations[k - 1] + 3,
              "jump " + std::to_string(iterations[k - 1]) + " -> " + std::to_string(iterations[k]));
  o.note("n=" + std::to_string(problem.operators.n()) + ", " + series);
  return o;
}

Outcome criterion_determinism() {
  Outcome o;
  const fs::path mesh = mesh_file("sphere10k", sphere10k);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  for (const char* threads : {"1", "2", "4"}) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      const CliRun r = run_eigs(std::string("c7_") + threads + "_" + std::to_string(k),
                                {"--mesh", mesh.string(), "--p", "50", "--eps", "1e-4", "--threads", threads});
      o.require(r.status == 0, "exit status");
      const std::string csv = slurp(r.dir / "eigenvalues.csv");
      if (k == 0)
        first = csv;
      else
        o.require(csv == first, std::string("runs differ with --threads ") + threads);
    }
  }
  const std::string one = slurp(work_dir() / "c7_1_0" / "eigenvalues.csv");
  const std::string four = slurp(work_dir() / "c7_4_0" / "eigenvalues.csv");
  o.note(one == four ? "identical across thread counts too" : "thread counts differ");
  return o;
}

Outcome criterion_boundary_conditions() {
  Outcome o;
  const fs::path mesh = mesh_file("disk", disk_mesh);
  const TriangleMesh disk = load_mesh(mesh);
  const double eps = 1e-4;
  const CliRun dirichlet = run_eigs("c8_dirichlet", {"--mesh", mesh.string(), "--p", "50", "--eps", "1e-4",
                                                     "--boundary", "dirichlet"});
  const CliRun neumann = run_eigs("c8_neumann", {"--mesh", mesh.string(), "--p", "50", "--eps", "1e-4",
                                                 "--boundary", "neumann"});
  check_residual_contract(o, "dirichlet", dirichlet, assemble_operators(disk, Boundary::Dirichlet), eps, 50);
  check_residual_contract(o, "neumann", neumann, assemble_operators(disk, Boundary::Neumann), eps, 50);
  if (dirichlet.status == 0 && neumann.status == 0) {
    const double d1 = dirichlet.rows[0].eigenvalue, n1 = neumann.rows[0].eigenvalue, n2 = neumann.rows[1].eigenvalue;
    o.require(d1 > 0.0, "Dirichlet lambda_1 = " + fmt(d1));
    o.require(std::abs(n1) < 1e-8 * n2, "Neumann lambda_1 = " + fmt(n1));
    // Unit disk: first Dirichlet eigenvalue j_{0,1}^2, first non-zero Neumann j'_{1,1}^2.
    o.note("n=" + std::to_string(disk.n_vertices()) + ", Dirichlet lambda_1 " + fmt(d1, "%.5g") +
           " (continuum 5.7832), Neumann lambda_1 " + fmt(n1) + ", lambda_2 " + fmt(n2, "%.5g") + " (continuum 3.3900)");
  }
  return o;
}

} // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"residual contract", criterion_residual_contract},
      {"analytic sphere", criterion_analytic_sphere},
      {"oracle equivalence", criterion_oracle_equivalence},
      {"iteration reduction", criterion_iteration_reduction},
      {"hierarchy invariants", criterion_hierarchy_invariants},
      {"tolerance scaling", criterion_tolerance_scaling},
      {"determinism", criterion_determinism},
      {"boundary conditions", criterion_boundary_conditions},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i)
    selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(number))
      continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << number << " (" << criteria[k].first << ", "
              << fmt(seconds_since(start), "%.1f") << " s): " << o.detail << std::endl;
  }
  fs::remove_all(work_dir());
  return failures == 0 ? 0 : 1;
}
