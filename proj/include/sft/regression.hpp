#pragma once

#include <iosfwd>

#include "sft/spectral_filter.hpp"

namespace sft {

/// Ridge weights over the design matrix F(X). The Chebyshev coefficients and
/// the feature projection are learned jointly, so `weights` has K*d entries in
/// block-major order (all d weights of order 0, then order 1, ...).
struct RegressionModel {
  Vector weights;
  int order = 0;
  int feature_dim = 0;
  double gamma = 0.0;
};

/// Gaussian regression target on a rows x cols grid, row-major.
struct LabelMap {
  Vector values;
  int rows = 0;
  int cols = 0;
  int peak_index = 0;
  double sigma = 0.0;
};

struct GridPoint {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

LabelMap gaussian_label_map(int rows, int cols, GridPoint center, double sigma);

/// What fit_ridge does when the normal equations cannot be factorized.
enum class SingularFallback { Throw, LeastSquares };

/// Solves (F^T F + gamma I) w = F^T y with a Cholesky factorization.
/// Throws SingularSystemError on a rank-deficient system unless `fallback`
/// is LeastSquares, in which case the minimum-norm least-squares solution
/// of the same system is returned.
RegressionModel fit_ridge(const Matrix& F, const Vector& y, double gamma, int order,
                          SingularFallback fallback = SingularFallback::Throw);

/// Convenience overload for a single block (order 1, d = F.cols()).
RegressionModel fit_ridge(const Matrix& F, const Vector& y, double gamma);

/// F w.
Vector predict_response(const Matrix& F, const RegressionModel& model);

/// Arg-max of the response as a grid coordinate; ties go to the smallest
/// row-major index.
GridPoint locate_peak(const Vector& response, int rows, int cols);

/// Text record: "K d gamma" header line, then K*d weights one per line.
void write_model(std::ostream& out, const RegressionModel& model);
RegressionModel read_model(std::istream& in);

}  // namespace sft
