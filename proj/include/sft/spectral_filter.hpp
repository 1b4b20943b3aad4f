#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sft/grid_graph.hpp"

namespace sft {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-order filter responses Z_k = T_k(L~) X for k = 0..K-1.
struct FilterResponseStack {
  std::vector<Matrix> blocks;

  int order() const { return static_cast<int>(blocks.size()); }
  int vertex_count() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }
  int feature_dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].cols()); }
};

/// Chebyshev coefficients theta_0..theta_{K-1}.
struct SpectralFilterSpec {
  Vector theta;
};

/// T_0..T_{K-1} of the scaled-shifted Laplacian applied to X through the
/// three-term recurrence Z_k = 2 L~ Z_{k-1} - Z_{k-2}. Only sparse products
/// are used; T_k(L~) is never formed.
FilterResponseStack chebyshev_responses(const LaplacianOperator& lap_tilde, const Matrix& X,
                                        int order);

/// sum_k theta_k T_k(L~) x.
Vector apply_filter(const LaplacianOperator& lap_tilde, const Vector& x,
                    const SpectralFilterSpec& spec);

/// Largest vertex count accepted by spectral_oracle.
inline constexpr int kDenseOracleCap = 4096;

/// U diag(ghat(lambda)) U^T x from a dense eigendecomposition of a normalized
/// Laplacian. Verification path only.
Vector spectral_oracle(const LaplacianOperator& lap, const Vector& x,
                       const std::function<double(double)>& ghat);

/// [Z_0, Z_1, ..., Z_{K-1}], block-major columns.
Matrix design_matrix(const FilterResponseStack& stack);

/// Scalar Chebyshev polynomial T_k(t).
double chebyshev_t(int k, double t);

}  // namespace sft
