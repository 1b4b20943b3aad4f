#include "sft/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <opencv2/imgproc.hpp>

namespace sft {

namespace {

cv::Mat to_double(const cv::Mat& patch) {
  cv::Mat out;
  patch.convertTo(out, CV_MAKETYPE(CV_64F, patch.channels()));
  return out;
}

cv::Mat gray_of(const cv::Mat& patch64) {
  if (patch64.channels() == 1) return patch64;
  std::vector<cv::Mat> bgr;
  cv::split(patch64, bgr);
  return 0.114 * bgr[0] + 0.587 * bgr[1] + 0.299 * bgr[2];
}

cv::Mat resample(const cv::Mat& channel, int grid) {
  if (channel.rows == grid && channel.cols == grid) return channel.clone();
  cv::Mat out;
  cv::resize(channel, out, cv::Size(grid, grid), 0.0, 0.0, cv::INTER_LINEAR);
  return out;
}

// Writes a standardized copy of `channel` into column `col` of `data`.
void store_standardized(const cv::Mat& channel, Matrix& data, int col) {
  const int n = channel.rows * channel.cols;
  double mean = 0.0;
  for (int r = 0; r < channel.rows; ++r) {
    const auto* row = channel.ptr<double>(r);
    for (int c = 0; c < channel.cols; ++c) mean += row[c];
  }
  mean /= n;
  double var = 0.0;
  for (int r = 0; r < channel.rows; ++r) {
    const auto* row = channel.ptr<double>(r);
    for (int c = 0; c < channel.cols; ++c) var += (row[c] - mean) * (row[c] - mean);
  }
  const double stddev = std::sqrt(var / n);
  if (!(stddev > 1e-9 * (1.0 + std::abs(mean)))) {
    data.col(col).setZero();
    return;
  }
  for (int r = 0; r < channel.rows; ++r) {
    const auto* row = channel.ptr<double>(r);
    for (int c = 0; c < channel.cols; ++c) {
      data(r * channel.cols + c, col) = (row[c] - mean) / stddev;
    }
  }
}

}  // namespace

std::string to_string(FeatureChannel channel) {
  switch (channel) {
    case FeatureChannel::RawGray:
      return "gray";
    case FeatureChannel::RawColor:
      return "color";
    case FeatureChannel::GradientHistogram:
      return "hog";
  }
  return "?";
}

FeatureChannel parse_feature_channel(const std::string& text) {
  for (auto c : {FeatureChannel::RawGray, FeatureChannel::RawColor,
                 FeatureChannel::GradientHistogram}) {
    if (text == to_string(c)) return c;
  }
  throw InvalidArgument(fmt::format("unknown feature channel '{}' (gray|color|hog)", text));
}

bool FeatureSpec::has(FeatureChannel channel) const {
  return std::find(channels.begin(), channels.end(), channel) != channels.end();
}

int FeatureSpec::channel_count() const {
  return (has(FeatureChannel::RawGray) ? 1 : 0) + (has(FeatureChannel::RawColor) ? 3 : 0) +
         (has(FeatureChannel::GradientHistogram) ? hog_bins : 0);
}

void FeatureSpec::validate() const {
  if (channels.empty()) throw InvalidArgument("feature spec selects no channels");
  if (grid_size < 1 || grid_size % 2 == 0) {
    throw InvalidArgument(fmt::format("grid_size must be odd and positive, got {}", grid_size));
  }
  if (hog_bins < 1) throw InvalidArgument("hog_bins must be positive");
  if (hog_cell < 1) throw InvalidArgument("hog_cell must be positive");
}

std::vector<cv::Mat> gradient_histogram(const cv::Mat& gray, int bins, int cell) {
  if (gray.empty() || gray.channels() != 1) {
    throw InvalidArgument("gradient_histogram expects a non-empty single-channel image");
  }
  if (bins < 1 || cell < 1) throw InvalidArgument("bins and cell must be positive");
  const cv::Mat img = to_double(gray);
  const int rows = img.rows;
  const int cols = img.cols;

  std::vector<cv::Mat> hist(bins);
  for (auto& h : hist) h = cv::Mat::zeros(rows, cols, CV_64F);

  const double bin_width = std::numbers::pi / bins;
  for (int r = 0; r < rows; ++r) {
    const auto* up = img.ptr<double>(std::max(r - 1, 0));
    const auto* mid = img.ptr<double>(r);
    const auto* down = img.ptr<double>(std::min(r + 1, rows - 1));
    for (int c = 0; c < cols; ++c) {
      const double gx = 0.5 * (mid[std::min(c + 1, cols - 1)] - mid[std::max(c - 1, 0)]);
      const double gy = 0.5 * (down[c] - up[c]);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta -= std::numbers::pi;
      const double pos = theta / bin_width;
      const int lo = std::min(static_cast<int>(pos), bins - 1);
      const double frac = pos - lo;
      const int hi = (lo + 1) % bins;
      hist[lo].at<double>(r, c) += (1.0 - frac) * mag;
      hist[hi].at<double>(r, c) += frac * mag;
    }
  }

  // Cell aggregation with bilinear spatial weights: a centered triangular
  // window of half-width `cell`, normalized to unit sum.
  if (cell > 1) {
    cv::Mat kernel(1, 2 * cell - 1, CV_64F);
    for (int i = 0; i < kernel.cols; ++i) kernel.at<double>(0, i) = cell - std::abs(i - (cell - 1));
    kernel /= cv::sum(kernel)[0];
    for (auto& h : hist) {
      cv::sepFilter2D(h, h, CV_64F, kernel, kernel.t(), cv::Point(-1, -1), 0.0,
                      cv::BORDER_REPLICATE);
    }
  }
  return hist;
}

FeatureMap extract_features(const cv::Mat& patch, const FeatureSpec& spec) {
  if (patch.empty()) throw InvalidArgument("extract_features: empty patch");
  if (patch.channels() != 1 && patch.channels() != 3) {
    throw InvalidArgument("extract_features: patch must have 1 or 3 channels");
  }
  spec.validate();

  const cv::Mat img = to_double(patch);
  const cv::Mat gray = gray_of(img);
  const int g = spec.grid_size;

  FeatureMap map;
  map.rows = g;
  map.cols = g;
  map.data.resize(static_cast<Eigen::Index>(g) * g, spec.channel_count());

  int col = 0;
  if (spec.has(FeatureChannel::RawGray)) store_standardized(resample(gray, g), map.data, col++);
  if (spec.has(FeatureChannel::RawColor)) {
    std::vector<cv::Mat> bgr;
    if (img.channels() == 3) {
      cv::split(img, bgr);
    } else {
      bgr.assign(3, img);
    }
    // R, G, B
    for (int ch = 2; ch >= 0; --ch) store_standardized(resample(bgr[ch], g), map.data, col++);
  }
  if (spec.has(FeatureChannel::GradientHistogram)) {
    for (const auto& bin : gradient_histogram(gray, spec.hog_bins, spec.hog_cell)) {
      store_standardized(resample(bin, g), map.data, col++);
    }
  }
  return map;
}

PcaProjection fit_pca(const Matrix& X, int target_dim) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n < 1 || d < 1) throw InvalidArgument("fit_pca: empty data");
  if (target_dim < 1 || target_dim > std::min(n, d)) {
    throw InvalidArgument(
        fmt::format("fit_pca: target dimension {} not in [1, min({}, {})]", target_dim, n, d));
  }

  PcaProjection pca;
  pca.mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - pca.mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("fit_pca: eigendecomposition failed");

  pca.basis.resize(d, target_dim);
  pca.explained_variance.resize(target_dim);
  for (int j = 0; j < target_dim; ++j) {
    const auto src = d - 1 - j;  // eigenvalues come out ascending
    Vector v = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    pca.basis.col(j) = v;
    pca.explained_variance[j] = std::max(0.0, eig.eigenvalues()[src]);
  }
  return pca;
}

Matrix project(const Matrix& X, const PcaProjection& pca) {
  if (X.cols() != pca.input_dim()) {
    throw InvalidArgument(fmt::format("project: data has {} columns, projection expects {}",
                                      X.cols(), pca.input_dim()));
  }
  return (X.rowwise() - pca.mean.transpose()) * pca.basis;
}

}  // namespace sft
