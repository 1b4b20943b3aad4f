#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sft/grid_graph.hpp"
#include "sft/selftest.hpp"

namespace sft {
namespace {

Eigen::VectorXd dense_eigenvalues(const SparseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(m)};
  return eig.eigenvalues();
}

GridGraph path_graph(int n) {
  return build_grid_graph(1, n, NeighborhoodSpec::of(NeighborhoodPattern::Case1));
}

TEST(GridGraph, SingleVertexHasNoEdges) {
  const auto g = build_grid_graph(1, 1, NeighborhoodSpec::of(NeighborhoodPattern::Case1));
  EXPECT_EQ(g.vertex_count(), 1);
  EXPECT_EQ(g.edge_count(), 0);
}

TEST(GridGraph, ThreeByThreeFourConnected) {
  const auto g = build_grid_graph(3, 3, NeighborhoodSpec::of(NeighborhoodPattern::Case1));
  // Brute-force enumeration of lattice pairs at Manhattan distance 1.
  int expected = 0;
  for (int a = 0; a < 9; ++a) {
    for (int b = a + 1; b < 9; ++b) {
      if (std::abs(a / 3 - b / 3) + std::abs(a % 3 - b % 3) == 1) ++expected;
    }
  }
  EXPECT_EQ(expected, 12);
  EXPECT_EQ(g.edge_count(), expected);
  EXPECT_DOUBLE_EQ(g.degrees()[g.index(1, 1)], 4.0);
}

TEST(GridGraph, SkipPatternConnectsAtSkipDistance) {
  const auto g = build_grid_graph(5, 5, NeighborhoodSpec::of(NeighborhoodPattern::Case3));
  const int center = g.index(2, 2);
  std::set<std::pair<int, int>> neighbors;
  for (SparseMatrix::InnerIterator it(g.adjacency(), center); it; ++it) {
    neighbors.emplace(g.row_of(static_cast<int>(it.col())), g.col_of(static_cast<int>(it.col())));
  }
  const std::set<std::pair<int, int>> expected{{0, 2}, {4, 2}, {2, 0}, {2, 4}};
  EXPECT_EQ(neighbors, expected);
}

TEST(GridGraph, EightConnectedGaussianWeights) {
  NeighborhoodSpec spec = NeighborhoodSpec::of(NeighborhoodPattern::Case2,
                                               EdgeWeighting::GaussianDistance);
  spec.gaussian_sigma = 1.5;
  const auto g = build_grid_graph(3, 3, spec);
  const int c = g.index(1, 1);
  EXPECT_EQ(g.adjacency().row(c).nonZeros(), 8);
  EXPECT_NEAR(g.adjacency().coeff(c, g.index(1, 2)), std::exp(-1.0 / 4.5), 1e-15);
  EXPECT_NEAR(g.adjacency().coeff(c, g.index(2, 2)), std::exp(-2.0 / 4.5), 1e-15);
}

TEST(GridGraph, DefaultSkipSteps) {
  EXPECT_EQ(NeighborhoodSpec::of(NeighborhoodPattern::Case3).skip_step, 2);
  EXPECT_EQ(NeighborhoodSpec::of(NeighborhoodPattern::Case4).skip_step, 3);
  const auto g = build_grid_graph(7, 7, NeighborhoodSpec::of(NeighborhoodPattern::Case4));
  EXPECT_EQ(g.adjacency().coeff(g.index(3, 3), g.index(3, 6)), 1.0);
  EXPECT_EQ(g.adjacency().coeff(g.index(3, 3), g.index(3, 5)), 0.0);
}

TEST(GridGraph, GaussianSigmaDefaultsToSkipStep) {
  const auto spec = NeighborhoodSpec::of(NeighborhoodPattern::Case3,
                                         EdgeWeighting::GaussianDistance);
  const auto g = build_grid_graph(5, 5, spec);
  // d = sigma = 2 gives exp(-1/2).
  EXPECT_NEAR(g.adjacency().coeff(g.index(2, 2), g.index(2, 4)), std::exp(-0.5), 1e-15);
}

TEST(GridGraph, RejectsBadArguments) {
  const auto case1 = NeighborhoodSpec::of(NeighborhoodPattern::Case1);
  EXPECT_THROW(build_grid_graph(0, 3, case1), InvalidArgument);
  EXPECT_THROW(build_grid_graph(3, -1, case1), InvalidArgument);
  EXPECT_THROW(build_grid_graph(2, 5, NeighborhoodSpec::of(NeighborhoodPattern::Case3)),
               InvalidArgument);
  NeighborhoodSpec bad = case1;
  bad.skip_step = 2;
  EXPECT_THROW(build_grid_graph(5, 5, bad), InvalidArgument);
  NeighborhoodSpec tight = NeighborhoodSpec::of(NeighborhoodPattern::Case3);
  tight.skip_step = 1;
  EXPECT_THROW(build_grid_graph(5, 5, tight), InvalidArgument);
}

TEST(GridGraph, StructuralInvariantsOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_grid_graph(rng);
    const Eigen::MatrixXd W(g.adjacency());
    EXPECT_EQ((W - W.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(W.diagonal().cwiseAbs().maxCoeff(), 0.0);
    const int bound = g.spec().pattern == NeighborhoodPattern::Case2 ? 8 : 4;
    for (int i = 0; i < g.vertex_count(); ++i) {
      EXPECT_LE(g.adjacency().row(i).nonZeros(), bound);
    }
    if (g.spec().weighting == EdgeWeighting::Binary01) {
      for (int i = 0; i < g.adjacency().outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(g.adjacency(), i); it; ++it) EXPECT_EQ(it.value(), 1.0);
      }
    }
    // Row sums of W are the degrees.
    EXPECT_LT((W.rowwise().sum() - g.degrees()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(GridGraph, EdgeListExport) {
  const auto g = build_grid_graph(2, 2, NeighborhoodSpec::of(NeighborhoodPattern::Case1));
  std::ostringstream out;
  g.write_edge_list(out);
  EXPECT_EQ(out.str(), "0 1 1\n0 2 1\n1 3 1\n2 3 1\n");
}

TEST(NormalizedLaplacian, TwoVertexPath) {
  const auto lap = normalized_laplacian(path_graph(2));
  const Eigen::MatrixXd L(lap.matrix);
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  EXPECT_LT((L - expected).cwiseAbs().maxCoeff(), 1e-15);
  const auto ev = dense_eigenvalues(lap.matrix);
  EXPECT_NEAR(ev[0], 0.0, 1e-12);
  EXPECT_NEAR(ev[1], 2.0, 1e-12);
}

TEST(NormalizedLaplacian, ThreeVertexPath) {
  const auto lap = normalized_laplacian(path_graph(3));
  const Eigen::MatrixXd L(lap.matrix);
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3d expected;
  expected << 1, -s, 0, -s, 1, -s, 0, -s, 1;
  EXPECT_LT((L - expected).cwiseAbs().maxCoeff(), 1e-15);
  const auto ev = dense_eigenvalues(lap.matrix);
  EXPECT_NEAR(ev[0], 0.0, 1e-12);
  EXPECT_NEAR(ev[1], 1.0, 1e-12);
  EXPECT_NEAR(ev[2], 2.0, 1e-12);
}

TEST(NormalizedLaplacian, IsolatedVertexRowIsZero) {
  const auto lap = normalized_laplacian(
      build_grid_graph(1, 1, NeighborhoodSpec::of(NeighborhoodPattern::Case1)));
  EXPECT_EQ(lap.matrix.nonZeros(), 0);
}

TEST(NormalizedLaplacian, SpectralProperties) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_grid_graph(rng);
    const auto lap = normalized_laplacian(g);
    // Null space: L D^{1/2} 1 = 0.
    const Eigen::VectorXd root_degree = g.degrees().cwiseSqrt();
    EXPECT_LT((lap.matrix * root_degree).cwiseAbs().maxCoeff(), 1e-10);
    // PSD on random vectors.
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd x(g.vertex_count());
      for (auto& v : x) v = normal(rng);
      EXPECT_GE(x.dot(lap.matrix * x), -1e-10);
    }
    const auto ev = dense_eigenvalues(lap.matrix);
    EXPECT_GE(ev.minCoeff(), -1e-10);
    EXPECT_LE(ev.maxCoeff(), 2.0 + 1e-10);
  }
}

TEST(CombinatorialLaplacian, IsDegreeMinusAdjacency) {
  const auto g = build_grid_graph(3, 4, NeighborhoodSpec::of(NeighborhoodPattern::Case2));
  const auto lap = combinatorial_laplacian(g);
  EXPECT_EQ(lap.kind, LaplacianKind::Combinatorial);
  const Eigen::MatrixXd L(lap.matrix);
  EXPECT_LT(L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GE(dense_eigenvalues(lap.matrix).minCoeff(), -1e-10);
}

TEST(ScaledLaplacian, TwoVertexPath) {
  const auto lt = scaled_laplacian(normalized_laplacian(path_graph(2)), 2.0);
  EXPECT_EQ(lt.kind, LaplacianKind::ScaledShifted);
  Eigen::Matrix2d expected;
  expected << 0, -1, -1, 0;
  EXPECT_LT((Eigen::MatrixXd(lt.matrix) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ScaledLaplacian, EigenvaluesFollowTheAffineMap) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lap = normalized_laplacian(random_grid_graph(rng));
    const double lambda_max = 1.5 + 0.1 * trial;
    const auto ev = dense_eigenvalues(lap.matrix);
    const auto ev_tilde = dense_eigenvalues(scaled_laplacian(lap, lambda_max).matrix);
    const Eigen::VectorXd mapped = (2.0 / lambda_max) * ev.array() - 1.0;
    EXPECT_LT((ev_tilde - mapped).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ScaledLaplacian, SpectrumInUnitIntervalWithEstimatedBound) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lap = normalized_laplacian(random_grid_graph(rng));
    for (auto mode : {LambdaMaxMode::Bound2, LambdaMaxMode::PowerIteration}) {
      const auto ev = dense_eigenvalues(scaled_laplacian(lap, estimate_lambda_max(lap, mode)).matrix);
      EXPECT_GE(ev.minCoeff(), -1.0 - 1e-8);
      EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-8);
    }
  }
}

TEST(ScaledLaplacian, RejectsBadInput) {
  const auto lap = normalized_laplacian(path_graph(3));
  EXPECT_THROW(scaled_laplacian(lap, 0.0), InvalidArgument);
  EXPECT_THROW(scaled_laplacian(lap, -1.0), InvalidArgument);
  EXPECT_THROW(scaled_laplacian(scaled_laplacian(lap, 2.0), 2.0), InvalidArgument);
}

TEST(LambdaMax, Bound2AndPowerIteration) {
  const auto two = normalized_laplacian(path_graph(2));
  const auto three = normalized_laplacian(path_graph(3));
  EXPECT_EQ(estimate_lambda_max(three, LambdaMaxMode::Bound2), 2.0);
  EXPECT_NEAR(estimate_lambda_max(two, LambdaMaxMode::PowerIteration), 2.0, 1e-6);
  EXPECT_NEAR(estimate_lambda_max(three, LambdaMaxMode::PowerIteration), 2.0, 1e-6);
}

TEST(LambdaMax, PowerIterationMatchesDenseSpectrumOnNonBipartiteGraph) {
  const auto lap = normalized_laplacian(
      build_grid_graph(5, 6, NeighborhoodSpec::of(NeighborhoodPattern::Case2)));
  const double dense = dense_eigenvalues(lap.matrix).maxCoeff();
  EXPECT_LT(dense, 2.0 - 1e-3);
  EXPECT_NEAR(estimate_lambda_max(lap, LambdaMaxMode::PowerIteration), dense, 1e-6 * dense);
}

TEST(LambdaMax, PowerIterationReportsNonConvergence) {
  const auto lap = normalized_laplacian(
      build_grid_graph(8, 8, NeighborhoodSpec::of(NeighborhoodPattern::Case2)));
  PowerIterationOptions options;
  options.max_iterations = 2;
  EXPECT_THROW(estimate_lambda_max(lap, LambdaMaxMode::PowerIteration, options), ConvergenceError);
  const auto edgeless = normalized_laplacian(
      build_grid_graph(1, 1, NeighborhoodSpec::of(NeighborhoodPattern::Case1)));
  EXPECT_THROW(estimate_lambda_max(edgeless, LambdaMaxMode::PowerIteration), ConvergenceError);
}

TEST(HopDistance, Examples) {
  const auto g = build_grid_graph(3, 3, NeighborhoodSpec::of(NeighborhoodPattern::Case1));
  EXPECT_EQ(hop_distance(g, 4, 4), 0);
  EXPECT_EQ(hop_distance(g, g.index(0, 0), g.index(2, 2)), 4);
  EXPECT_EQ(hop_distance(g, g.index(0, 0), g.index(0, 1)), 1);
  EXPECT_THROW(hop_distance(g, 0, 9), InvalidArgument);
}

TEST(HopDistance, SkipPatternSplitsParityClasses) {
  const auto g = build_grid_graph(5, 5, NeighborhoodSpec::of(NeighborhoodPattern::Case3));
  EXPECT_FALSE(hop_distance(g, g.index(0, 0), g.index(0, 1)).has_value());
  EXPECT_EQ(hop_distance(g, g.index(0, 0), g.index(4, 4)), 4);
}

}  // namespace
}  // namespace sft
