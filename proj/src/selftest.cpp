#include "sft/selftest.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sft/regression.hpp"

namespace sft {

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

FilterResponseStack responses_or_default(const ResponseFn& fn, const LaplacianOperator& lap,
                                         const Matrix& X, int order) {
  return fn ? fn(lap, X, order) : chebyshev_responses(lap, X, order);
}

PropertyReport finish(PropertyReport report) {
  report.passed = report.worst <= report.tolerance && report.detail.empty();
  return report;
}

}  // namespace

FilterResponseStack perturbed_chebyshev_responses(const LaplacianOperator& lap_tilde,
                                                  const Matrix& X, int order) {
  auto stack = chebyshev_responses(lap_tilde, X, order);
  for (int k = 1; k < stack.order(); ++k) {
    const Eigen::RowVectorXd leak = 1e-6 * stack.blocks[k - 1].colwise().sum();
    stack.blocks[k].rowwise() += leak;
  }
  return stack;
}

GridGraph random_grid_graph(std::mt19937_64& rng, int max_vertices) {
  const auto pattern = static_cast<NeighborhoodPattern>(uniform_int(rng, 0, 3));
  const auto weighting = uniform_int(rng, 0, 1) == 0 ? EdgeWeighting::Binary01
                                                     : EdgeWeighting::GaussianDistance;
  NeighborhoodSpec spec = NeighborhoodSpec::of(pattern, weighting);
  if (weighting == EdgeWeighting::GaussianDistance) {
    spec.gaussian_sigma = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
  }
  const int min_side = std::max(2, spec.skip_step + 1);
  const int max_rows = std::max(min_side, max_vertices / min_side);
  const int rows = uniform_int(rng, min_side, std::min(max_rows, 16));
  const int cols = uniform_int(rng, min_side, std::max(min_side, max_vertices / rows));
  return build_grid_graph(rows, cols, spec);
}

PropertyReport check_spectral_equivalence(std::uint64_t seed, int graphs, double tolerance,
                                          const ResponseFn& responses) {
  PropertyReport report{"spectral_equivalence", false, 0, 0.0, tolerance, {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int g = 0; g < graphs; ++g) {
    const GridGraph graph = random_grid_graph(rng);
    const auto lap = normalized_laplacian(graph);
    const auto mode = g % 2 == 0 ? LambdaMaxMode::Bound2 : LambdaMaxMode::PowerIteration;
    PowerIterationOptions power;
    power.seed = seed + static_cast<std::uint64_t>(g);
    const double lambda_max = estimate_lambda_max(lap, mode, power);
    const auto lap_tilde = scaled_laplacian(lap, lambda_max);

    const int d = uniform_int(rng, 1, 8);
    const int order = uniform_int(rng, 1, 8);
    const Matrix X = random_matrix(rng, graph.vertex_count(), d);
    SpectralFilterSpec filter{Vector(order)};
    for (int k = 0; k < order; ++k) filter.theta[k] = coef(rng);

    const auto ghat = [&](double lambda) {
      const double t = 2.0 * lambda / lambda_max - 1.0;
      double sum = 0.0;
      for (int k = 0; k < order; ++k) sum += filter.theta[k] * chebyshev_t(k, t);
      return sum;
    };
    const auto stack = responses ? responses(lap_tilde, X, order) : FilterResponseStack{};
    for (int j = 0; j < d; ++j) {
      Vector z;
      if (responses) {
        z = Vector::Zero(graph.vertex_count());
        for (int k = 0; k < order; ++k) z += filter.theta[k] * stack.blocks[k].col(j);
      } else {
        z = apply_filter(lap_tilde, X.col(j), filter);
      }
      const Vector oracle = spectral_oracle(lap, X.col(j), ghat);
      report.worst = std::max(report.worst, (z - oracle).lpNorm<Eigen::Infinity>());
    }
    ++report.cases;
  }
  return finish(report);
}

PropertyReport check_khop_locality(std::uint64_t seed, int graphs, int max_order,
                                   double tolerance, const ResponseFn& responses) {
  PropertyReport report{"khop_locality", false, 0, 0.0, tolerance, {}};
  std::mt19937_64 rng(seed);
  for (int g = 0; g < graphs; ++g) {
    const GridGraph graph = random_grid_graph(rng);
    const auto lap_tilde = scaled_laplacian(normalized_laplacian(graph), 2.0);
    const int n = graph.vertex_count();
    // All indicator signals at once: column i is e_i.
    const Matrix identity = Matrix::Identity(n, n);
    const auto stack = responses_or_default(responses, lap_tilde, identity, max_order);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto hops = hop_distance(graph, i, j);
        for (int k = 0; k < max_order; ++k) {
          if (hops && *hops <= k) continue;
          report.worst = std::max(report.worst, std::abs(stack.blocks[k](j, i)));
        }
      }
    }
    ++report.cases;
  }
  return finish(report);
}

PropertyReport check_ridge_oracle(std::uint64_t seed, int instances, double tolerance,
                                  double stationarity_tolerance) {
  PropertyReport report{"ridge_oracle", false, 0, 0.0, tolerance, {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gamma_dist(0.1, 5.0);
  double worst_gradient = 0.0;
  for (int t = 0; t < instances; ++t) {
    const int p = uniform_int(rng, 1, 12);
    const int n = uniform_int(rng, p, 40);
    const Matrix F = random_matrix(rng, n, p);
    const Vector y = random_matrix(rng, n, 1);
    const double gamma = t % 10 == 0 ? 0.0 : gamma_dist(rng);

    const RegressionModel model = fit_ridge(F, y, gamma);
    const Matrix normal = F.transpose() * F + gamma * Matrix::Identity(p, p);
    const Vector oracle = normal.inverse() * (F.transpose() * y);
    report.worst = std::max(report.worst, (model.weights - oracle).lpNorm<Eigen::Infinity>());

    const Vector gradient = 2.0 * (F.transpose() * (F * model.weights - y) + gamma * model.weights);
    worst_gradient = std::max(worst_gradient, gradient.lpNorm<Eigen::Infinity>());
    ++report.cases;
  }
  if (worst_gradient > stationarity_tolerance) {
    report.detail = fmt::format("stationarity residual {:.3e} > {:.1e}", worst_gradient,
                                stationarity_tolerance);
  }
  return finish(report);
}

std::vector<PropertyReport> run_selftest(const SelfTestOptions& options) {
  ResponseFn responses;
  if (options.fault == FaultInjection::PerturbedRecurrence) responses = perturbed_chebyshev_responses;
  return {
      check_spectral_equivalence(options.seed, 20, 1e-8, responses),
      check_khop_locality(options.seed + 1, 5, 8, 1e-12, responses),
      check_ridge_oracle(options.seed + 2, 50, 1e-8, 1e-6),
  };
}

std::string format_report(const std::vector<PropertyReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += fmt::format("{} {:<22} cases={:<3} worst={:.3e} tol={:.0e}{}\n",
                       r.passed ? "PASS" : "FAIL", r.name, r.cases, r.worst, r.tolerance,
                       r.detail.empty() ? "" : "  " + r.detail);
  }
  return out;
}

}  // namespace sft
