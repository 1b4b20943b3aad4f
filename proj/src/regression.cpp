#include "sft/regression.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <fmt/format.h>

namespace sft {

LabelMap gaussian_label_map(int rows, int cols, GridPoint center, double sigma) {
  if (rows < 1 || cols < 1) throw InvalidArgument("label grid must be non-empty");
  if (center.row < 0 || center.row >= rows || center.col < 0 || center.col >= cols) {
    throw InvalidArgument(fmt::format("label center ({}, {}) outside {}x{} grid", center.row,
                                      center.col, rows, cols));
  }
  if (!(sigma > 0.0)) throw InvalidArgument("label sigma must be positive");

  LabelMap label;
  label.rows = rows;
  label.cols = cols;
  label.sigma = sigma;
  label.peak_index = center.row * cols + center.col;
  label.values.resize(static_cast<Eigen::Index>(rows) * cols);
  const double denom = 2.0 * sigma * sigma;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double dr = r - center.row;
      const double dc = c - center.col;
      label.values[r * cols + c] = std::exp(-(dr * dr + dc * dc) / denom);
    }
  }
  return label;
}

RegressionModel fit_ridge(const Matrix& F, const Vector& y, double gamma, int order,
                          SingularFallback fallback) {
  if (F.rows() < 1 || F.cols() < 1) throw InvalidArgument("design matrix must be non-empty");
  if (y.size() != F.rows()) {
    throw InvalidArgument(
        fmt::format("label has {} entries, design matrix has {} rows", y.size(), F.rows()));
  }
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be non-negative");
  if (order < 1 || F.cols() % order != 0) {
    throw InvalidArgument(
        fmt::format("{} columns do not split into {} filter blocks", F.cols(), order));
  }

  const auto p = F.cols();
  Matrix gram = Matrix::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(F.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += gamma;
  const Vector rhs = F.transpose() * y;

  RegressionModel model;
  model.order = order;
  model.feature_dim = static_cast<int>(p / order);
  model.gamma = gamma;

  Eigen::LLT<Matrix> llt(gram);
  const double eps = std::numeric_limits<double>::epsilon();
  if (llt.info() == Eigen::Success && llt.rcond() > static_cast<double>(p) * eps) {
    model.weights = llt.solve(rhs);
    return model;
  }
  if (fallback == SingularFallback::Throw) {
    throw SingularSystemError(fmt::format(
        "normal equations are singular ({}x{}, gamma = {})", p, p, gamma));
  }
  model.weights = gram.completeOrthogonalDecomposition().solve(rhs);
  return model;
}

RegressionModel fit_ridge(const Matrix& F, const Vector& y, double gamma) {
  return fit_ridge(F, y, gamma, 1);
}

Vector predict_response(const Matrix& F, const RegressionModel& model) {
  if (F.cols() != model.weights.size()) {
    throw InvalidArgument(fmt::format("design matrix has {} columns, model has {} weights",
                                      F.cols(), model.weights.size()));
  }
  return F * model.weights;
}

GridPoint locate_peak(const Vector& response, int rows, int cols) {
  if (rows < 1 || cols < 1 || response.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw InvalidArgument(fmt::format("response of length {} does not fill a {}x{} grid",
                                      response.size(), rows, cols));
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < response.size(); ++i) {
    if (response[i] > response[best]) best = i;
  }
  return {static_cast<int>(best / cols), static_cast<int>(best % cols)};
}

void write_model(std::ostream& out, const RegressionModel& model) {
  out << fmt::format("{} {} {:.17g}\n", model.order, model.feature_dim, model.gamma);
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) {
    out << fmt::format("{:.17g}\n", model.weights[i]);
  }
}

RegressionModel read_model(std::istream& in) {
  RegressionModel model;
  if (!(in >> model.order >> model.feature_dim >> model.gamma) || model.order < 1 ||
      model.feature_dim < 1 || model.gamma < 0.0) {
    throw ParseError("model record: bad header");
  }
  const Eigen::Index count = static_cast<Eigen::Index>(model.order) * model.feature_dim;
  model.weights.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> model.weights[i])) {
      throw ParseError(fmt::format("model record: expected {} weights, read {}", count, i));
    }
  }
  return model;
}

}  // namespace sft
