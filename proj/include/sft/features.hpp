#pragma once

#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "sft/spectral_filter.hpp"

namespace sft {

enum class FeatureChannel { RawGray, RawColor, GradientHistogram };

std::string to_string(FeatureChannel channel);
FeatureChannel parse_feature_channel(const std::string& text);

struct FeatureSpec {
  // Extraction order is fixed (gray, color, gradient histogram) regardless
  // of the order listed here.
  std::vector<FeatureChannel> channels{FeatureChannel::RawGray,
                                       FeatureChannel::GradientHistogram};
  int grid_size = 57;  // odd, so the lattice has a unique center vertex
  int hog_bins = 9;
  int hog_cell = 4;

  bool has(FeatureChannel channel) const;
  /// Number of output channels d.
  int channel_count() const;
  void validate() const;
};

/// Per-vertex features on a grid_size x grid_size lattice; row r*cols+c of
/// `data` holds the d channels of vertex (r, c).
struct FeatureMap {
  int rows = 0;
  int cols = 0;
  Matrix data;

  int dim() const { return static_cast<int>(data.cols()); }
};

/// Computes the selected channels on `patch` (8-bit or floating point, 1 or
/// 3 channels, BGR order), resamples each bilinearly onto the feature grid
/// and standardizes it to zero mean and unit variance. Constant channels
/// become all zeros.
FeatureMap extract_features(const cv::Mat& patch, const FeatureSpec& spec);

/// Orientation histograms of unsigned gradients, one CV_64F map per bin at
/// the input resolution. Bin b is centered at b*pi/bins and each gradient's
/// magnitude is split linearly between the two nearest bin centers. Votes
/// are aggregated over cells with bilinear spatial weighting, evaluated
/// densely (a centered triangular window of half-width `cell`).
std::vector<cv::Mat> gradient_histogram(const cv::Mat& gray, int bins, int cell);

struct PcaProjection {
  Vector mean;
  Matrix basis;                 // d x d', orthonormal columns
  Vector explained_variance;    // d' eigenvalues of the (1/n) covariance, descending

  int input_dim() const { return static_cast<int>(mean.size()); }
  int output_dim() const { return static_cast<int>(basis.cols()); }
};

/// Top `target_dim` principal directions of the rows of X. Each basis column
/// is sign-normalized so its largest-magnitude entry is positive.
PcaProjection fit_pca(const Matrix& X, int target_dim);

/// (X - mean) basis.
Matrix project(const Matrix& X, const PcaProjection& pca);

}  // namespace sft
