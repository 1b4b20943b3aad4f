#include "sft/spectral_filter.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace sft {

FilterResponseStack chebyshev_responses(const LaplacianOperator& lap_tilde, const Matrix& X,
                                        int order) {
  if (lap_tilde.kind != LaplacianKind::ScaledShifted) {
    throw InvalidArgument("chebyshev_responses: expected a scaled-shifted Laplacian");
  }
  if (order < 1) throw InvalidArgument(fmt::format("filter order must be >= 1, got {}", order));
  if (X.rows() != lap_tilde.size()) {
    throw InvalidArgument(fmt::format("signal has {} rows, operator has {} vertices", X.rows(),
                                      lap_tilde.size()));
  }

  FilterResponseStack stack;
  stack.blocks.reserve(order);
  stack.blocks.push_back(X);
  if (order >= 2) stack.blocks.push_back(lap_tilde.matrix * X);
  for (int k = 2; k < order; ++k) {
    Matrix next = 2.0 * (lap_tilde.matrix * stack.blocks[k - 1]);
    next -= stack.blocks[k - 2];
    stack.blocks.push_back(std::move(next));
  }
  return stack;
}

Vector apply_filter(const LaplacianOperator& lap_tilde, const Vector& x,
                    const SpectralFilterSpec& spec) {
  const auto order = static_cast<int>(spec.theta.size());
  const auto stack = chebyshev_responses(lap_tilde, x, order);
  Vector out = Vector::Zero(x.size());
  for (int k = 0; k < order; ++k) out += spec.theta[k] * stack.blocks[k].col(0);
  return out;
}

Vector spectral_oracle(const LaplacianOperator& lap, const Vector& x,
                       const std::function<double(double)>& ghat) {
  if (lap.kind != LaplacianKind::Normalized) {
    throw InvalidArgument("spectral_oracle: expected a normalized Laplacian");
  }
  const int n = lap.size();
  if (n > kDenseOracleCap) {
    throw InvalidArgument(
        fmt::format("spectral_oracle: {} vertices exceeds the dense cap {}", n, kDenseOracleCap));
  }
  if (x.size() != n) throw InvalidArgument("spectral_oracle: signal length mismatch");

  const Matrix dense = Matrix(lap.matrix);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dense);
  if (eig.info() != Eigen::Success) throw NumericError("dense eigendecomposition failed");
  const Matrix& U = eig.eigenvectors();
  Vector coeffs = U.transpose() * x;
  for (int l = 0; l < n; ++l) coeffs[l] *= ghat(eig.eigenvalues()[l]);
  return U * coeffs;
}

Matrix design_matrix(const FilterResponseStack& stack) {
  const int n = stack.vertex_count();
  const int d = stack.feature_dim();
  Matrix F(n, static_cast<Eigen::Index>(stack.order()) * d);
  for (int k = 0; k < stack.order(); ++k) F.middleCols(static_cast<Eigen::Index>(k) * d, d) = stack.blocks[k];
  return F;
}

double chebyshev_t(int k, double t) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int i = 2; i <= k; ++i) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace sft
