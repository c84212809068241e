#include "hsim/cli.hpp"

#include "hsim/error.hpp"
#include "hsim/hierarchy.hpp"
#include "hsim/hsim.hpp"
#include "hsim/io.hpp"
#include "hsim/kernels.hpp"
#include "hsim/shapes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace hsim::cli {

namespace fs = std::filesystem;

namespace {

struct SolverFlags {
  std::string mesh;
  std::size_t p = 0;
  double eps = 1e-2;
  std::size_t levels = 0;
  double sigma = 7.0;
  double alpha = 0.1;
  std::string solver = "hsim";
  std::string boundary = "neumann";
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out = ".";
  bool export_vectors = false;
  bool verbose = false;
};

struct BenchFlags {
  std::vector<std::string> meshes;
  std::vector<std::size_t> ps;
  std::vector<double> epss;
  std::size_t levels = 0;
  double sigma = 7.0;
  double alpha = 0.1;
  std::string boundary = "neumann";
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out = ".";
};

struct MeshFlags {
  std::string shape = "icosphere";
  int resolution = 4;
  double jitter = 0.0;
  double bumps = 0.0;
  std::uint64_t seed = 42;
  std::string output;
};

Boundary parse_boundary(const std::string& name) {
  return name == "dirichlet" ? Boundary::Dirichlet : Boundary::Neumann;
}

HsimConfig make_config(std::size_t p, double eps, std::size_t levels, double sigma, double alpha,
                       std::uint64_t seed) {
  HsimConfig config;
  config.p = p;
  config.tolerance = eps;
  config.levels = levels;
  config.sigma = sigma;
  config.alpha = alpha;
  config.seed = seed;
  return config;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());
}

void log(bool verbose, const std::string& message) {
  if (verbose)
    std::cerr << message << '\n';
}

int cmd_eigs(const SolverFlags& f) {
  if (f.p == 0)
    throw Error(ErrorKind::Usage, "--p must be at least 1");
  kernels::set_thread_count(f.threads);
  const fs::path out_dir(f.out);
  ensure_dir(out_dir);

  const Boundary boundary = parse_boundary(f.boundary);
  LaplaceProblem problem = make_problem(load_mesh(f.mesh), boundary);
  log(f.verbose, "mesh: " + std::to_string(problem.mesh.n_vertices()) + " vertices, " +
                     std::to_string(problem.mesh.n_faces()) + " faces (" +
                     std::to_string(problem.mesh.dropped_faces) + " degenerate dropped)");

  const HsimConfig config = make_config(f.p, f.eps, f.levels, f.sigma, f.alpha, f.seed);
  const HsimResult result =
      f.solver == "sim" ? sim_baseline_solve(problem, config) : hsim_solve(problem, config);
  const EigenSolution& sol = result.solution;
  log(f.verbose, "iterations " + result.report.iteration_string() + ", hierarchy " +
                     format_double(result.report.hierarchy_seconds) + " s, solve " +
                     format_double(result.report.solve_seconds) + " s");

  std::vector<io::EigenvalueRow> rows;
  for (std::size_t i = 0; i < f.p; ++i)
    rows.push_back({i, sol.eigenvalues[static_cast<Eigen::Index>(i)],
                    sol.residuals[static_cast<Eigen::Index>(i)]});
  const fs::path csv = out_dir / "eigenvalues.csv";
  io::write_eigenvalues_csv(csv, rows);

  nlohmann::json record;
  record["mesh"] = f.mesh;
  record["n"] = problem.operators.n();
  record["p"] = f.p;
  record["eps"] = f.eps;
  record["levels"] = result.levels;
  record["sigma"] = f.sigma;
  record["alpha"] = f.alpha;
  record["seed"] = f.seed;
  record["solver"] = f.solver;
  record["boundary"] = f.boundary;
  record["iterations"] = result.report.iteration_string();
  record["hierarchy_seconds"] = result.report.hierarchy_seconds;
  record["solve_seconds"] = result.report.solve_seconds;
  record["outputs"] = {csv.string()};

  if (f.export_vectors) {
    // Full-length vectors per mesh vertex; eliminated Dirichlet vertices are 0.
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(problem.mesh.n_vertices()),
                                                 static_cast<Eigen::Index>(f.p));
    const auto& dofs = problem.operators.dofs;
    for (std::size_t k = 0; k < dofs.size(); ++k)
      full.row(dofs[k]) = sol.eigenvectors.row(static_cast<Eigen::Index>(k)).head(full.cols());
    const fs::path vec = out_dir / "eigenvectors.hsev";
    io::write_vectors_hsev(vec, full);
    record["outputs"].push_back(vec.string());
  }

  if (f.verbose) {
    const fs::path trace = out_dir / "trace.csv";
    std::ofstream t(trace);
    if (!t)
      throw Error(ErrorKind::Io, "cannot write '" + trace.string() + "'");
    t << "level,iteration,converged,locked,max_residual,seconds\n";
    for (const LevelReport& level : result.report.levels)
      for (const IterationTrace& it : level.trace)
        t << level.level << ',' << it.iteration << ',' << it.converged << ',' << it.locked << ','
          << format_double(it.max_residual) << ',' << format_double(it.seconds) << '\n';
    record["outputs"].push_back(trace.string());
  }

  std::ofstream(out_dir / "run.json") << record.dump(2) << '\n';
  return 0;
}

int cmd_bench(const BenchFlags& f) {
  kernels::set_thread_count(f.threads);
  const fs::path out_dir(f.out);
  ensure_dir(out_dir);
  const fs::path path = out_dir / "bench.csv";
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << "mesh,n,p,eps,solver,iterations,hierarchy_seconds,solve_seconds,total_seconds,status,"
         "message\n";

  const Boundary boundary = parse_boundary(f.boundary);
  for (const std::string& mesh_path : f.meshes) {
    std::optional<LaplaceProblem> problem;
    std::string load_error;
    try {
      problem = make_problem(load_mesh(mesh_path), boundary);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (std::size_t p : f.ps)
      for (double eps : f.epss)
        for (const char* solver : {"hsim", "sim"}) {
          out << csv_field(mesh_path) << ',' << (problem ? problem->operators.n() : 0) << ',' << p
              << ',' << format_double(eps) << ',' << solver << ',';
          if (!problem) {
            out << ",,,,error," << csv_field(load_error) << '\n';
            continue;
          }
          try {
            HsimConfig config = make_config(p, eps, f.levels, f.sigma, f.alpha, f.seed);
            auto solve = [&](const HsimConfig& c) {
              return std::string(solver) == "sim" ? sim_baseline_solve(*problem, c)
                                                  : hsim_solve(*problem, c);
            };
            // First pass finds the iteration schedule with convergence tests,
            // the second replays it without them and provides the timings.
            const HsimResult checked = solve(config);
            config.replay = checked.report.replay_schedule();
            const HsimResult timed = solve(config);
            out << checked.report.iteration_string() << ','
                << format_double(timed.report.hierarchy_seconds) << ','
                << format_double(timed.report.solve_seconds) << ','
                << format_double(timed.report.total_seconds()) << ",ok,\n";
          } catch (const std::exception& e) {
            out << ",,,,error," << csv_field(e.what()) << '\n';
          }
          out.flush();
        }
  }
  return 0;
}

int cmd_hierarchy(const SolverFlags& f) {
  if (f.p == 0)
    throw Error(ErrorKind::Usage, "--p must be at least 1");
  kernels::set_thread_count(f.threads);
  const fs::path out_dir(f.out);
  ensure_dir(out_dir);
  const LaplaceProblem problem = make_problem(load_mesh(f.mesh), parse_boundary(f.boundary));
  HierarchyOptions options;
  options.p = f.p;
  options.levels = f.levels;
  options.sigma = f.sigma;
  options.start = SeededStart{f.seed};
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);

  std::ofstream summary(out_dir / "hierarchy.csv");
  if (!summary)
    throw Error(ErrorKind::Io, "cannot write hierarchy summary");
  summary << "level,size,radius,mean_nnz_per_row\n";
  for (std::size_t t = 0; t < h.levels(); ++t) {
    summary << t << ',' << h.size(t) << ',';
    if (t + 1 < h.levels()) {
      const SparseMatrix& u = h.prolongations[t];
      summary << format_double(h.radii[t]) << ','
              << format_double(static_cast<double>(u.nonZeros()) / static_cast<double>(u.rows()));
      io::write_matrix_market_file(out_dir / ("prolongation_" + std::to_string(t) + ".mtx"), u);
    } else {
      summary << ',';
    }
    summary << '\n';
    if (t > 0)
      io::write_index_list(out_dir / ("samples_" + std::to_string(t) + ".txt"), h.vertex_sets[t]);
  }
  return 0;
}

int cmd_mesh(const MeshFlags& f) {
  TriangleMesh mesh;
  if (f.shape == "icosphere")
    mesh = shapes::icosphere(f.resolution);
  else if (f.shape == "cubesphere")
    mesh = shapes::cube_sphere(f.resolution);
  else if (f.shape == "torus")
    mesh = shapes::torus(2 * f.resolution, f.resolution);
  else
    mesh = shapes::hex_disk(f.resolution);
  if (f.bumps != 0.0)
    mesh = shapes::bumpy(mesh, f.bumps);
  if (f.jitter > 0.0)
    mesh = shapes::jitter(mesh, f.jitter, f.seed);
  save_off(f.output, mesh);
  return 0;
}

void add_solver_options(CLI::App* cmd, SolverFlags& f, bool solve) {
  cmd->add_option("--mesh", f.mesh, "Triangle mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--p", f.p, "Number of eigenpairs")->required();
  if (solve)
    cmd->add_option("--eps", f.eps, "Relative residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--levels", f.levels, "Hierarchy levels (0 = automatic)");
  cmd->add_option("--sigma", f.sigma, "Support control parameter")->check(CLI::PositiveNumber);
  if (solve) {
    cmd->add_option("--alpha", f.alpha, "Shift ratio in [0, 0.5)")->check(CLI::Range(0.0, 0.4999999));
    cmd->add_option("--solver", f.solver, "hsim or sim")->check(CLI::IsMember({"hsim", "sim"}));
    cmd->add_flag("--export-vectors", f.export_vectors, "Write eigenvectors.hsev");
    cmd->add_flag("--verbose", f.verbose, "Log progress and write trace.csv");
  }
  cmd->add_option("--boundary", f.boundary, "neumann or dirichlet")
      ->check(CLI::IsMember({"neumann", "dirichlet"}));
  cmd->add_option("--seed", f.seed, "Seed for all randomness");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "Output directory");
}

} // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Lowest Laplace-Beltrami eigenpairs of triangle meshes by hierarchical subspace iteration"};
  app.require_subcommand(1);

  SolverFlags eigs_flags;
  auto* eigs = app.add_subcommand("eigs", "Compute the lowest eigenpairs");
  add_solver_options(eigs, eigs_flags, true);

  SolverFlags hier_flags;
  auto* hier = app.add_subcommand("hierarchy", "Dump the sample sets and prolongation matrices");
  add_solver_options(hier, hier_flags, false);

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Compare HSIM and SIM timings");
  bench->add_option("--mesh", bench_flags.meshes, "Meshes")->required();
  bench->add_option("--p", bench_flags.ps, "Eigenpair counts")->required()->delimiter(',');
  bench->add_option("--eps", bench_flags.epss, "Tolerances")->delimiter(',');
  bench->add_option("--levels", bench_flags.levels, "Hierarchy levels (0 = automatic)");
  bench->add_option("--sigma", bench_flags.sigma, "Support control parameter");
  bench->add_option("--alpha", bench_flags.alpha, "Shift ratio");
  bench->add_option("--boundary", bench_flags.boundary, "neumann or dirichlet")
      ->check(CLI::IsMember({"neumann", "dirichlet"}));
  bench->add_option("--seed", bench_flags.seed, "Seed");
  bench->add_option("--threads", bench_flags.threads, "Worker threads");
  bench->add_option("--out", bench_flags.out, "Output directory");

  MeshFlags mesh_flags;
  auto* mesh = app.add_subcommand("mesh", "Write a procedural test mesh");
  mesh->add_option("--shape", mesh_flags.shape, "icosphere, cubesphere, torus or disk")
      ->check(CLI::IsMember({"icosphere", "cubesphere", "torus", "disk"}));
  mesh->add_option("--resolution", mesh_flags.resolution, "Subdivisions / cells / rings")
      ->check(CLI::PositiveNumber);
  mesh->add_option("--jitter", mesh_flags.jitter, "Random vertex displacement (fraction of edge)");
  mesh->add_option("--bumps", mesh_flags.bumps, "Radial bump amplitude");
  mesh->add_option("--seed", mesh_flags.seed, "Seed");
  mesh->add_option("--output", mesh_flags.output, "Output OFF file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*eigs)
      return cmd_eigs(eigs_flags);
    if (*hier)
      return cmd_hierarchy(hier_flags);
    if (*bench) {
      if (bench_flags.epss.empty())
        bench_flags.epss = {1e-2};
      return cmd_bench(bench_flags);
    }
    return cmd_mesh(mesh_flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"hsim"};
  for (const auto& a : args)
    argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace hsim::cli
