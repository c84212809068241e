#include "hsim/error.hpp"
#include "hsim/hierarchy.hpp"
#include "hsim/hsim.hpp"
#include "hsim/oracle.hpp"
#include "hsim/shapes.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace hsim;
using hsim::testing::path_graph;
using hsim::testing::random_block;
using hsim::testing::random_spd;
using hsim::testing::to_sparse;

namespace {

std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

} // namespace

TEST(LevelPlan, ThreeLevelExample) {
  const LevelPlan plan = plan_levels(160000, 1000, 3);
  ASSERT_EQ(plan.levels, 3u);
  EXPECT_EQ(plan.sizes, (std::vector<std::size_t>{160000, 7114, 1500}));
  EXPECT_NEAR(plan.growth_rate, std::cbrt(160000.0 / 1500.0), 1e-14);
}

TEST(LevelPlan, CoarsestSize) {
  EXPECT_EQ(coarsest_level_size(50), 1000u);
  EXPECT_EQ(coarsest_level_size(1000), 1500u);
  EXPECT_EQ(coarsest_level_size(1001), 1502u); // ceil(1501.5)
  EXPECT_EQ(plan_levels(20000, 50, 2).sizes, (std::vector<std::size_t>{20000, 1000}));
}

TEST(LevelPlan, CollapsesWhenMeshIsSmall) {
  for (std::size_t t : {1u, 2u, 3u, 5u}) {
    const LevelPlan plan = plan_levels(800, 50, t);
    EXPECT_EQ(plan.levels, 1u);
    EXPECT_EQ(plan.sizes, std::vector<std::size_t>{800});
  }
  EXPECT_EQ(plan_levels(1000, 50, 3).levels, 1u);
}

TEST(LevelPlan, DropsLevelsThatWouldNotDecrease) {
  // growth^(T-1) overshoots n0 for many levels on a barely larger mesh.
  const LevelPlan plan = plan_levels(1010, 10, 6);
  for (std::size_t i = 1; i < plan.sizes.size(); ++i)
    EXPECT_LT(plan.sizes[i], plan.sizes[i - 1]);
  EXPECT_EQ(plan.sizes.front(), 1010u);
  EXPECT_EQ(plan.sizes.back(), 1000u);
  EXPECT_EQ(plan.levels, plan.sizes.size());
}

TEST(LevelPlan, DefaultLevelCount) {
  EXPECT_EQ(default_level_count(50), 2u);
  EXPECT_EQ(default_level_count(200), 2u);
  EXPECT_EQ(default_level_count(201), 3u);
  EXPECT_EQ(default_level_count(1000), 3u);
}

TEST(SupportRadius, Formula) {
  EXPECT_NEAR(support_radius(1000, 4 * std::numbers::pi, 7.0), 0.16733200530681511, 1e-15);
  const double r = support_radius(500, 3.0, 2.0);
  EXPECT_NEAR(support_radius(500, 3.0, 8.0), 2 * r, 1e-15);
  EXPECT_NEAR(support_radius(2000, 3.0, 2.0), r / 2, 1e-15);
}

TEST(Prolongation, PathGraphExample) {
  const std::vector<int> fine = {0, 1, 2}, coarse = {0, 2};
  const Eigen::MatrixXd u = build_prolongation(path_graph(3), fine, coarse, 1.5);
  EXPECT_EQ(u, (Eigen::MatrixXd(3, 2) << 1, 0, 0.5, 0.5, 0, 1).finished());
}

TEST(Prolongation, HatPeakAndEquidistantRows) {
  // rho = 2: vertex 1 is at rho/2 from both samples, vertex 0 reaches 2 only
  // at d = rho where the weight vanishes.
  const std::vector<int> fine = {0, 1, 2}, coarse = {0, 2};
  const SparseMatrix u = build_prolongation(path_graph(3), fine, coarse, 2.0);
  EXPECT_EQ(Eigen::MatrixXd(u), (Eigen::MatrixXd(3, 2) << 1, 0, 0.5, 0.5, 0, 1).finished());
  EXPECT_EQ(u.nonZeros(), 4);
}

TEST(Prolongation, UncoveredRowsFallBackToNearestSample) {
  const std::vector<int> fine = iota_vector(7), coarse = {0, 6};
  const Eigen::MatrixXd u = build_prolongation(path_graph(7), fine, coarse, 1.0);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(u.row(i).sum(), 1.0);
    EXPECT_EQ(u(i, i < 3 ? 0 : 1), i == 3 ? u(3, 1) : 1.0);
  }
  // Vertex 3 is equidistant; the fallback picks one sample with weight 1.
  EXPECT_EQ(u.row(3).maxCoeff(), 1.0);
}

TEST(Prolongation, SubsetFineSetUsesLocalRows) {
  // Fine set is a subset of the mesh vertices, in an arbitrary order.
  const std::vector<int> fine = {4, 0, 2}, coarse = {0, 4};
  const Eigen::MatrixXd u = build_prolongation(path_graph(5), fine, coarse, 3.0);
  EXPECT_NEAR(u(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(u(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(u(2, 0), 0.5, 1e-15);
  EXPECT_NEAR(u(2, 1), 0.5, 1e-15);
}

TEST(Restriction, IdentityLeavesMatrixUnchanged) {
  const Eigen::MatrixXd a = random_spd(12, 1);
  EXPECT_LT((Eigen::MatrixXd(restrict_operator(to_sparse(a), to_sparse(Eigen::MatrixXd::Identity(12, 12)))) - a)
                .cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Restriction, RandomSpdAgainstDenseTripleProduct) {
  const Eigen::MatrixXd a = random_spd(30, 2);
  Eigen::MatrixXd u = random_block(30, 8, 3).cwiseAbs();
  const Eigen::MatrixXd c = restrict_operator(to_sparse(a), to_sparse(u));
  const Eigen::MatrixXd ref = u.transpose() * a * u;
  EXPECT_LT((c - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues().minCoeff(), 0.0);
}

TEST(ProlongBlock, ConstantsIdentityAndDenseOracle) {
  const TriangleMesh mesh = shapes::icosphere(3);
  const EdgeGraph g = build_edge_graph(mesh);
  const std::size_t sizes[] = {100};
  const VertexSampling vs = farthest_point_sample(g, sizes, FixedStart{0});
  const std::vector<int> fine = iota_vector(static_cast<int>(mesh.n_vertices()));
  const SparseMatrix u = build_prolongation(g, fine, vs.level(0), support_radius(100, surface_area(mesh), 7.0));
  const ColumnBlock ones = prolong_block(u, Eigen::MatrixXd::Ones(100, 1));
  EXPECT_LT((ones.array() - 1.0).abs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd b = random_block(100, 6, 4);
  EXPECT_LT((prolong_block(u, b) - Eigen::MatrixXd(u) * b).cwiseAbs().maxCoeff(), 1e-13);
  const SparseMatrix id = to_sparse(Eigen::MatrixXd::Identity(100, 100));
  EXPECT_EQ(prolong_block(id, b), b);
}

namespace {

struct HierarchyCase {
  const char* name;
  TriangleMesh mesh;
  std::size_t p;
  std::size_t levels;
  Boundary boundary;
};

void check_hierarchy(const HierarchyCase& c, bool check_sparsity) {
  SCOPED_TRACE(c.name);
  const LaplaceProblem problem = make_problem(c.mesh, c.boundary);
  HierarchyOptions options;
  options.p = c.p;
  options.levels = c.levels;
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  const LevelPlan plan = plan_levels(problem.operators.n(), c.p, c.levels);
  ASSERT_EQ(h.levels(), plan.levels);
  if (c.boundary == Boundary::Neumann)
    EXPECT_EQ(h.plan.sizes, plan.sizes);
  EXPECT_EQ(h.size(h.levels() - 1), coarsest_level_size(c.p));
  for (std::size_t t = 0; t + 1 < h.levels(); ++t) {
    SCOPED_TRACE("level " + std::to_string(t));
    EXPECT_LT(h.size(t + 1), h.size(t));
    const SparseMatrix& u = h.prolongations[t];
    ASSERT_EQ(static_cast<std::size_t>(u.rows()), h.size(t));
    ASSERT_EQ(static_cast<std::size_t>(u.cols()), h.size(t + 1));
    const Eigen::VectorXd rows = u * Eigen::VectorXd::Ones(u.cols());
    EXPECT_LT((rows.array() - 1.0).abs().maxCoeff(), 1e-12);
    for (Eigen::Index j = 0; j < u.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(u, j); it; ++it) {
        EXPECT_GT(it.value(), 0.0);
        EXPECT_LE(it.value(), 1.0);
      }
    const double mean_nnz = static_cast<double>(u.nonZeros()) / static_cast<double>(u.rows());
    EXPECT_GE(mean_nnz, 7.0 / 2);
    EXPECT_LE(mean_nnz, 2 * 7.0);
    if (check_sparsity) {
      EXPECT_GE(mean_nnz, 7.0 - 4);
      EXPECT_LE(mean_nnz, 7.0 + 4);
    }
    // Sample sets are nested; level 0 is the set of degrees of freedom, which
    // omits eliminated boundary vertices that coarse samples may still use.
    if (t > 0 || c.boundary == Boundary::Neumann) {
      std::set<int> fine(h.vertex_sets[t].begin(), h.vertex_sets[t].end());
      for (int v : h.vertex_sets[t + 1])
        EXPECT_TRUE(fine.count(v));
    }
  }
  for (std::size_t t = 0; t < h.levels(); ++t) {
    const SparseMatrix& s = h.stiffness[t];
    EXPECT_EQ(SparseMatrix(s - SparseMatrix(s.transpose())).norm(), 0.0);
    if (c.boundary == Boundary::Neumann) {
      const Eigen::VectorXd s1 = s * Eigen::VectorXd::Ones(s.cols());
      EXPECT_LT(s1.cwiseAbs().maxCoeff(), 1e-10) << "level " << t;
    }
  }
}

} // namespace

TEST(Hierarchy, InvariantsOnSmallMeshes) {
  check_hierarchy({"torus", shapes::jitter(shapes::torus(80, 30), 0.2, 1), 20, 2, Boundary::Neumann}, false);
  check_hierarchy({"sphere3", shapes::icosphere(4), 10, 3, Boundary::Neumann}, false);
  check_hierarchy({"disk", shapes::hex_disk(30), 20, 2, Boundary::Neumann}, false);
}

TEST(Hierarchy, InvariantsOnTenThousandVertexMeshes) {
  check_hierarchy({"icosphere5", shapes::icosphere(5), 100, 2, Boundary::Neumann}, true);
  check_hierarchy({"bumpy cube", shapes::bumpy(shapes::cube_sphere(45), 0.15), 50, 3, Boundary::Neumann}, true);
}

TEST(Hierarchy, DirichletRestrictsFineRowsToInterior) {
  const TriangleMesh disk = shapes::hex_disk(30);
  check_hierarchy({"dirichlet disk", disk, 20, 2, Boundary::Dirichlet}, false);
  const LaplaceProblem problem = make_problem(disk, Boundary::Dirichlet);
  HierarchyOptions options;
  options.p = 20;
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  EXPECT_EQ(h.vertex_sets[0], problem.operators.dofs);
  ASSERT_EQ(h.levels(), 2u);
  EXPECT_EQ(h.prolongations[0].rows(), problem.operators.n());
  // The coarse operators inherit definiteness from the fine Dirichlet pair.
  EXPECT_GT(oracle::dense_reference(h.stiffness[1], h.mass[1], 1).eigenvalues[0], 0.0);
}

TEST(Hierarchy, KernelPreservedOnEveryLevel) {
  const LaplaceProblem problem = make_problem(shapes::jitter(shapes::cube_sphere(20), 0.2, 3));
  HierarchyOptions options;
  options.p = 10;
  options.levels = 3;
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  ASSERT_EQ(h.levels(), 3u);
  for (std::size_t t = 0; t < h.levels(); ++t) {
    const auto ref = oracle::dense_reference(h.stiffness[t], h.mass[t], 2);
    EXPECT_LE(std::abs(ref.eigenvalues[0]), 1e-8 * ref.eigenvalues[1]) << "level " << t;
  }
}

TEST(Hierarchy, NestedRestrictionEqualsProductRestriction) {
  const LaplaceProblem problem = make_problem(shapes::jitter(shapes::icosphere(5), 0.2, 4));
  HierarchyOptions options;
  options.p = 10;
  options.levels = 3;
  const Hierarchy h = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  ASSERT_EQ(h.levels(), 3u);
  const SparseMatrix product = h.prolongations[0] * h.prolongations[1];
  const Eigen::MatrixXd direct = restrict_operator(problem.operators.stiffness, product);
  const Eigen::MatrixXd twice = h.stiffness[2];
  EXPECT_LT((direct - twice).cwiseAbs().maxCoeff(), 1e-12 * twice.cwiseAbs().maxCoeff());
}

TEST(Hierarchy, DeterministicForSeed) {
  const LaplaceProblem problem = make_problem(shapes::jitter(shapes::torus(90, 30), 0.2, 5));
  HierarchyOptions options;
  options.p = 20;
  options.start = SeededStart{17};
  const Hierarchy a = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  const Hierarchy b = build_hierarchy(problem.graph, problem.area, problem.operators, options);
  EXPECT_EQ(a.vertex_sets, b.vertex_sets);
  EXPECT_EQ(Eigen::MatrixXd(a.stiffness.back()), Eigen::MatrixXd(b.stiffness.back()));
}
