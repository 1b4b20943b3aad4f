#include "sft/grid_graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include <fmt/format.h>

namespace sft {

namespace {

struct Offset {
  int dr;
  int dc;
};

// Half stencils: only offsets pointing "forward" in row-major order, so every
// undirected edge is generated once and mirrored.
std::vector<Offset> forward_offsets(const NeighborhoodSpec& spec) {
  const int s = spec.skip_step;
  switch (spec.pattern) {
    case NeighborhoodPattern::Case1:
      return {{0, 1}, {1, 0}};
    case NeighborhoodPattern::Case2:
      return {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
    case NeighborhoodPattern::Case3:
    case NeighborhoodPattern::Case4:
      return {{0, s}, {s, 0}};
  }
  return {};
}

void check_normalized(const LaplacianOperator& lap, const char* what) {
  if (lap.kind != LaplacianKind::Normalized) {
    throw InvalidArgument(fmt::format("{}: expected a normalized Laplacian", what));
  }
}

}  // namespace

int default_skip_step(NeighborhoodPattern pattern) {
  switch (pattern) {
    case NeighborhoodPattern::Case1:
    case NeighborhoodPattern::Case2:
      return 1;
    case NeighborhoodPattern::Case3:
      return 2;
    case NeighborhoodPattern::Case4:
      return 3;
  }
  return 1;
}

NeighborhoodSpec NeighborhoodSpec::of(NeighborhoodPattern pattern, EdgeWeighting weighting) {
  NeighborhoodSpec spec;
  spec.pattern = pattern;
  spec.skip_step = default_skip_step(pattern);
  spec.weighting = weighting;
  return spec;
}

void NeighborhoodSpec::validate() const {
  const bool adjacent =
      pattern == NeighborhoodPattern::Case1 || pattern == NeighborhoodPattern::Case2;
  if (adjacent && skip_step != 1) {
    throw InvalidArgument(
        fmt::format("{} requires skip_step = 1, got {}", to_string(pattern), skip_step));
  }
  if (!adjacent && skip_step < 2) {
    throw InvalidArgument(
        fmt::format("{} requires skip_step >= 2, got {}", to_string(pattern), skip_step));
  }
  if (weighting == EdgeWeighting::GaussianDistance && gaussian_sigma < 0.0) {
    throw InvalidArgument("gaussian_sigma must be positive");
  }
}

std::string to_string(NeighborhoodPattern pattern) {
  switch (pattern) {
    case NeighborhoodPattern::Case1:
      return "case1";
    case NeighborhoodPattern::Case2:
      return "case2";
    case NeighborhoodPattern::Case3:
      return "case3";
    case NeighborhoodPattern::Case4:
      return "case4";
  }
  return "?";
}

std::string to_string(EdgeWeighting weighting) {
  return weighting == EdgeWeighting::Binary01 ? "binary" : "gaussian";
}

NeighborhoodPattern parse_pattern(const std::string& text) {
  for (auto p : {NeighborhoodPattern::Case1, NeighborhoodPattern::Case2,
                 NeighborhoodPattern::Case3, NeighborhoodPattern::Case4}) {
    if (text == to_string(p)) return p;
  }
  throw InvalidArgument(fmt::format("unknown neighborhood '{}' (case1..case4)", text));
}

EdgeWeighting parse_weighting(const std::string& text) {
  if (text == "binary") return EdgeWeighting::Binary01;
  if (text == "gaussian") return EdgeWeighting::GaussianDistance;
  throw InvalidArgument(fmt::format("unknown weighting '{}' (binary|gaussian)", text));
}

Eigen::VectorXd GridGraph::degrees() const {
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(vertex_count());
  for (int i = 0; i < adjacency_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(adjacency_, i); it; ++it) deg[i] += it.value();
  }
  return deg;
}

void GridGraph::write_edge_list(std::ostream& out) const {
  for (int i = 0; i < adjacency_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(adjacency_, i); it; ++it) {
      if (it.col() > i) out << fmt::format("{} {} {:.17g}\n", i, it.col(), it.value());
    }
  }
}

GridGraph build_grid_graph(int rows, int cols, const NeighborhoodSpec& spec) {
  if (rows < 1 || cols < 1) {
    throw InvalidArgument(fmt::format("grid dimensions must be positive, got {}x{}", rows, cols));
  }
  spec.validate();
  if (spec.skip_step > 1 && spec.skip_step >= std::min(rows, cols)) {
    throw InvalidArgument(fmt::format("skip_step {} must be smaller than min({}, {})",
                                      spec.skip_step, rows, cols));
  }

  const auto offsets = forward_offsets(spec);
  const double sigma = spec.effective_sigma();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(rows) * cols * offsets.size() * 2);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      for (const auto& o : offsets) {
        const int r2 = r + o.dr;
        const int c2 = c + o.dc;
        if (r2 < 0 || r2 >= rows || c2 < 0 || c2 >= cols) continue;
        const int j = r2 * cols + c2;
        double w = 1.0;
        if (spec.weighting == EdgeWeighting::GaussianDistance) {
          const double d2 = static_cast<double>(o.dr * o.dr + o.dc * o.dc);
          w = std::exp(-d2 / (2.0 * sigma * sigma));
        }
        triplets.emplace_back(i, j, w);
        triplets.emplace_back(j, i, w);
      }
    }
  }

  GridGraph graph;
  graph.rows_ = rows;
  graph.cols_ = cols;
  graph.spec_ = spec;
  graph.adjacency_.resize(rows * cols, rows * cols);
  graph.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  graph.adjacency_.makeCompressed();
  return graph;
}

LaplacianOperator combinatorial_laplacian(const GridGraph& graph) {
  const int n = graph.vertex_count();
  SparseMatrix degree(n, n);
  degree.setIdentity();
  degree.diagonal() = graph.degrees();
  LaplacianOperator lap;
  lap.matrix = degree - graph.adjacency();
  lap.matrix.makeCompressed();
  lap.kind = LaplacianKind::Combinatorial;
  return lap;
}

LaplacianOperator normalized_laplacian(const GridGraph& graph) {
  const int n = graph.vertex_count();
  const Eigen::VectorXd deg = graph.degrees();
  Eigen::VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(graph.adjacency().nonZeros()) + n);
  for (int i = 0; i < n; ++i) {
    // Isolated vertices keep an all-zero row.
    if (deg[i] > 0.0) triplets.emplace_back(i, i, 1.0);
    for (SparseMatrix::InnerIterator it(graph.adjacency(), i); it; ++it) {
      const auto j = static_cast<int>(it.col());
      triplets.emplace_back(i, j, -it.value() * inv_sqrt[i] * inv_sqrt[j]);
    }
  }
  LaplacianOperator lap;
  lap.matrix.resize(n, n);
  lap.matrix.setFromTriplets(triplets.begin(), triplets.end());
  lap.matrix.makeCompressed();
  lap.kind = LaplacianKind::Normalized;
  lap.lambda_max = 2.0;
  return lap;
}

LaplacianOperator scaled_laplacian(const LaplacianOperator& lap, double lambda_max) {
  check_normalized(lap, "scaled_laplacian");
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw InvalidArgument(fmt::format("lambda_max must be positive, got {}", lambda_max));
  }
  const int n = lap.size();
  SparseMatrix identity(n, n);
  identity.setIdentity();
  LaplacianOperator out;
  out.matrix = (2.0 / lambda_max) * lap.matrix - identity;
  out.matrix.makeCompressed();
  out.kind = LaplacianKind::ScaledShifted;
  out.lambda_max = lambda_max;
  return out;
}

std::string to_string(LambdaMaxMode mode) {
  return mode == LambdaMaxMode::Bound2 ? "bound2" : "power";
}

LambdaMaxMode parse_lambda_max_mode(const std::string& text) {
  if (text == "bound2") return LambdaMaxMode::Bound2;
  if (text == "power") return LambdaMaxMode::PowerIteration;
  throw InvalidArgument(fmt::format("unknown lambda_max mode '{}' (bound2|power)", text));
}

double estimate_lambda_max(const LaplacianOperator& lap, LambdaMaxMode mode,
                           const PowerIterationOptions& options) {
  check_normalized(lap, "estimate_lambda_max");
  if (mode == LambdaMaxMode::Bound2) return 2.0;

  const int n = lap.size();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  v.normalize();

  Eigen::VectorXd lv(n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    lv.noalias() = lap.matrix * v;
    const double rho = v.dot(lv);
    const double residual = (lv - rho * v).norm();
    if (rho > 0.0 && residual <= options.tolerance * rho) return std::min(rho, 2.0);
    const double norm = lv.norm();
    // Zero Laplacian (edgeless graph); no positive eigenvalue exists.
    if (norm == 0.0) break;
    v = lv / norm;
  }
  throw ConvergenceError(fmt::format("power iteration did not converge in {} iterations",
                                     options.max_iterations));
}

std::optional<int> hop_distance(const GridGraph& graph, int from, int to) {
  const int n = graph.vertex_count();
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw InvalidArgument(fmt::format("vertex index out of range [0, {})", n));
  }
  if (from == to) return 0;
  std::vector<int> dist(n, -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  const auto& adj = graph.adjacency();
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (SparseMatrix::InnerIterator it(adj, u); it; ++it) {
      const auto v = static_cast<int>(it.col());
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      if (v == to) return dist[v];
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

}  // namespace sft
