#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include <opencv2/core.hpp>

#include "sft/features.hpp"
#include "sft/grid_graph.hpp"
#include "sft/regression.hpp"

namespace sft {

/// Axis-aligned box in image pixels, (x, y) is the top-left corner (0-based).
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct TrackerConfig {
  NeighborhoodSpec neighborhood = NeighborhoodSpec::of(NeighborhoodPattern::Case3);
  FeatureSpec feature_spec;
  double gamma = 1.0;
  double alpha = 0.01;           // model learning rate
  double search_factor = 2.4;    // candidate region side / target side
  double label_sigma_ratio = 0.1;
  int scale_count = 33;
  double scale_step = 1.02;
  LambdaMaxMode lambda_max_mode = LambdaMaxMode::Bound2;
  int k_cap = 60;
  int pca_dims = 100;            // projected dimension is min(d, pca_dims)
  int patch_size = 114;          // crop resolution before feature extraction
  std::uint64_t seed = 0;        // power-iteration start vector

  void validate() const;
};

/// K = min(k_cap, ceil(max(h, w) / skip_step)), h and w in feature-grid cells.
int filter_order_for_target(double h, double w, int skip_step, int k_cap);

/// Exponents r of the scale pyramid, floor((1-S)/2) .. floor((S-1)/2).
std::pair<int, int> scale_exponent_range(int scale_count);

/// Candidate scale factors a^r in increasing r.
std::vector<double> scale_factors(int scale_count, double scale_step);

/// Lattice structures shared by every frame of a sequence.
struct SpatialModel {
  GridGraph graph;
  LaplacianOperator lap_tilde;
  LabelMap label;
  int order = 1;
};

struct TrackerState {
  TrackerConfig config;
  std::shared_ptr<const SpatialModel> spatial;
  PcaProjection pca;
  RegressionModel model;
  double center_x = 0.0;
  double center_y = 0.0;
  double base_w = 0.0;   // target size at init
  double base_h = 0.0;
  double scale = 1.0;    // cumulative multiplier on the base size
  int frame_width = 0;
  int frame_height = 0;
  int frame_index = 0;   // frames consumed so far (1 after init)

  double target_w() const { return base_w * scale; }
  double target_h() const { return base_h * scale; }
  BoundingBox box() const {
    return BoundingBox::from_center(center_x, center_y, target_w(), target_h());
  }
};

/// Candidate region centered on (cx, cy) with the given size, resampled to
/// out_size x out_size. Pixels outside the frame replicate the border.
cv::Mat crop_region(const cv::Mat& frame, double cx, double cy, double region_w,
                    double region_h, int out_size);

/// Projected features of the candidate region for a target of size (w, h)
/// centered on (cx, cy).
Matrix region_features(const TrackerState& state, const cv::Mat& frame, double cx, double cy,
                       double target_w, double target_h);

TrackerState init_tracker(const cv::Mat& frame, const BoundingBox& bbox,
                          const TrackerConfig& config);

/// Detection score of the candidate region, one entry per lattice vertex.
Vector detection_response(const TrackerState& state, const cv::Mat& frame, double cx, double cy,
                          double target_w, double target_h);

/// Best multiplier a^r over the pyramid, scored by the peak detection
/// response at the current center.
double estimate_scale(const TrackerState& state, const cv::Mat& frame);

RegressionModel update_model(const RegressionModel& old_model, const RegressionModel& fresh,
                             double alpha);

std::pair<TrackerState, BoundingBox> track_frame(const TrackerState& state,
                                                 const cv::Mat& frame);

}  // namespace sft
