#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCore>

#include "sft/errors.hpp"

namespace sft {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Neighborhood stencils on the pixel lattice.
///   Case1: 4 axis-aligned neighbors at distance 1
///   Case2: Case1 plus the 4 diagonals
///   Case3: 4 axis-aligned neighbors at distance skip_step (default 2)
///   Case4: same as Case3 with a wider step (default 3)
enum class NeighborhoodPattern { Case1, Case2, Case3, Case4 };

enum class EdgeWeighting { Binary01, GaussianDistance };

struct NeighborhoodSpec {
  NeighborhoodPattern pattern = NeighborhoodPattern::Case3;
  int skip_step = 2;
  EdgeWeighting weighting = EdgeWeighting::Binary01;
  // Only read for GaussianDistance. Non-positive means "use skip_step".
  double gaussian_sigma = 0.0;

  /// Spec with the default skip step for `pattern`.
  static NeighborhoodSpec of(NeighborhoodPattern pattern,
                             EdgeWeighting weighting = EdgeWeighting::Binary01);

  double effective_sigma() const {
    return gaussian_sigma > 0.0 ? gaussian_sigma : static_cast<double>(skip_step);
  }
  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

int default_skip_step(NeighborhoodPattern pattern);
std::string to_string(NeighborhoodPattern pattern);
std::string to_string(EdgeWeighting weighting);
NeighborhoodPattern parse_pattern(const std::string& text);
EdgeWeighting parse_weighting(const std::string& text);

/// Undirected weighted graph over a rows x cols pixel lattice. Vertices are
/// indexed row-major, 0-based: index = row * cols + col.
class GridGraph {
 public:
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int vertex_count() const { return rows_ * cols_; }
  const SparseMatrix& adjacency() const { return adjacency_; }
  const NeighborhoodSpec& spec() const { return spec_; }

  int index(int row, int col) const { return row * cols_ + col; }
  int row_of(int vertex) const { return vertex / cols_; }
  int col_of(int vertex) const { return vertex % cols_; }

  /// Undirected edge count (each {i, j} once).
  std::int64_t edge_count() const { return adjacency_.nonZeros() / 2; }
  /// Weighted degree, i.e. the row sum of W.
  Eigen::VectorXd degrees() const;

  /// Writes "i j weight" per undirected edge with i < j.
  void write_edge_list(std::ostream& out) const;

 private:
  friend GridGraph build_grid_graph(int rows, int cols, const NeighborhoodSpec& spec);

  int rows_ = 0;
  int cols_ = 0;
  SparseMatrix adjacency_;
  NeighborhoodSpec spec_;
};

GridGraph build_grid_graph(int rows, int cols, const NeighborhoodSpec& spec);

enum class LaplacianKind { Combinatorial, Normalized, ScaledShifted };

struct LaplacianOperator {
  SparseMatrix matrix;
  LaplacianKind kind = LaplacianKind::Normalized;
  // Spectral bound the operator was scaled with (ScaledShifted) or that is
  // known for it (Normalized: 2 until estimated). Zero when unknown.
  double lambda_max = 0.0;

  int size() const { return static_cast<int>(matrix.rows()); }
};

/// L = D - W.
LaplacianOperator combinatorial_laplacian(const GridGraph& graph);

/// I - D^{-1/2} W D^{-1/2}. Rows/columns of isolated vertices are zero.
LaplacianOperator normalized_laplacian(const GridGraph& graph);

/// (2 / lambda_max) L - I for a normalized Laplacian.
LaplacianOperator scaled_laplacian(const LaplacianOperator& lap, double lambda_max);

enum class LambdaMaxMode { Bound2, PowerIteration };

std::string to_string(LambdaMaxMode mode);
LambdaMaxMode parse_lambda_max_mode(const std::string& text);

struct PowerIterationOptions {
  int max_iterations = 100000;
  // Convergence when ||L v - rho v|| <= tolerance * rho.
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
};

/// Largest eigenvalue of a normalized Laplacian. Bound2 returns 2.
/// PowerIteration throws ConvergenceError after max_iterations.
double estimate_lambda_max(const LaplacianOperator& lap, LambdaMaxMode mode,
                           const PowerIterationOptions& options = {});

/// Breadth-first hop count between two vertices, nullopt when unreachable.
std::optional<int> hop_distance(const GridGraph& graph, int from, int to);

}  // namespace sft
