#include "sft/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <opencv2/imgproc.hpp>

namespace sft {

namespace {

constexpr double kMinTargetSide = 4.0;

void check_frame(const cv::Mat& frame) {
  if (frame.empty()) throw InvalidArgument("empty frame");
  if (frame.channels() != 1 && frame.channels() != 3) {
    throw InvalidArgument("frames must have 1 or 3 channels");
  }
}

Matrix responses_for(const TrackerState& state, const Matrix& features) {
  const auto stack = chebyshev_responses(state.spatial->lap_tilde, features, state.spatial->order);
  return design_matrix(stack);
}

RegressionModel fit_at(const TrackerState& state, const cv::Mat& frame) {
  const Matrix X = region_features(state, frame, state.center_x, state.center_y, state.target_w(),
                                   state.target_h());
  return fit_ridge(responses_for(state, X), state.spatial->label.values, state.config.gamma,
                   state.spatial->order, SingularFallback::LeastSquares);
}

}  // namespace

void TrackerConfig::validate() const {
  neighborhood.validate();
  feature_spec.validate();
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(search_factor > 0.0)) throw InvalidArgument("search_factor must be positive");
  if (!(label_sigma_ratio > 0.0)) throw InvalidArgument("label_sigma_ratio must be positive");
  if (scale_count < 1 || scale_count % 2 == 0) {
    throw InvalidArgument("scale_count must be odd and positive");
  }
  if (!(scale_step > 1.0)) throw InvalidArgument("scale_step must be > 1");
  if (k_cap < 1) throw InvalidArgument("k_cap must be positive");
  if (pca_dims < 1) throw InvalidArgument("pca_dims must be positive");
  if (patch_size < 1) throw InvalidArgument("patch_size must be positive");
}

int filter_order_for_target(double h, double w, int skip_step, int k_cap) {
  if (skip_step < 1) throw InvalidArgument("skip_step must be positive");
  if (k_cap < 1) throw InvalidArgument("k_cap must be positive");
  const double extent = std::max({h, w, 1.0});
  // Integer-valued ratios must not be pushed up a step by rounding noise.
  const double ratio = extent / skip_step;
  const double nearest = std::round(ratio);
  const auto order = static_cast<int>(std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio));
  return std::clamp(order, 1, k_cap);
}

std::pair<int, int> scale_exponent_range(int scale_count) {
  const auto lo = static_cast<int>(std::floor((1.0 - scale_count) / 2.0));
  const auto hi = static_cast<int>(std::floor((scale_count - 1) / 2.0));
  return {lo, hi};
}

std::vector<double> scale_factors(int scale_count, double scale_step) {
  const auto [lo, hi] = scale_exponent_range(scale_count);
  std::vector<double> factors;
  factors.reserve(hi - lo + 1);
  for (int r = lo; r <= hi; ++r) factors.push_back(std::pow(scale_step, r));
  return factors;
}

cv::Mat crop_region(const cv::Mat& frame, double cx, double cy, double region_w,
                    double region_h, int out_size) {
  check_frame(frame);
  if (!(region_w > 0.0 && region_h > 0.0) || out_size < 1) {
    throw InvalidArgument("crop_region: region and output size must be positive");
  }
  const double sx = region_w / out_size;
  const double sy = region_h / out_size;
  const double left = cx - 0.5 * region_w;
  const double top = cy - 0.5 * region_h;

  // Only the source window the warp reads is converted to floating point;
  // it is clamped to the frame, so border replication sees the frame edge.
  const int x0 = std::clamp(static_cast<int>(std::floor(left)) - 2, 0, frame.cols - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(top)) - 2, 0, frame.rows - 1);
  const int x1 = std::clamp(static_cast<int>(std::ceil(left + region_w)) + 2, x0 + 1, frame.cols);
  const int y1 = std::clamp(static_cast<int>(std::ceil(top + region_h)) + 2, y0 + 1, frame.rows);
  cv::Mat window;
  frame(cv::Rect(x0, y0, x1 - x0, y1 - y0)).convertTo(window, CV_MAKETYPE(CV_64F, frame.channels()));

  // Destination pixel u samples the source at left + (u + 0.5) sx in edge
  // coordinates, i.e. that minus 0.5 in OpenCV pixel-center coordinates.
  const cv::Matx23d map(sx, 0.0, left + 0.5 * sx - 0.5 - x0,
                        0.0, sy, top + 0.5 * sy - 0.5 - y0);
  cv::Mat out;
  cv::warpAffine(window, out, map, cv::Size(out_size, out_size),
                 cv::INTER_LINEAR | cv::WARP_INVERSE_MAP, cv::BORDER_REPLICATE);
  return out;
}

Matrix region_features(const TrackerState& state, const cv::Mat& frame, double cx, double cy,
                       double target_w, double target_h) {
  const auto& cfg = state.config;
  const cv::Mat patch = crop_region(frame, cx, cy, cfg.search_factor * target_w,
                                    cfg.search_factor * target_h, cfg.patch_size);
  const FeatureMap features = extract_features(patch, cfg.feature_spec);
  return project(features.data, state.pca);
}

TrackerState init_tracker(const cv::Mat& frame, const BoundingBox& bbox,
                          const TrackerConfig& config) {
  check_frame(frame);
  config.validate();
  if (!bbox.valid() || !std::isfinite(bbox.x) || !std::isfinite(bbox.y)) {
    throw InvalidArgument(fmt::format("degenerate initial box ({}, {}, {}, {})", bbox.x, bbox.y,
                                      bbox.w, bbox.h));
  }
  if (bbox.x < 0.0 || bbox.y < 0.0 || bbox.x + bbox.w > frame.cols ||
      bbox.y + bbox.h > frame.rows) {
    throw InvalidArgument(fmt::format("initial box ({}, {}, {}, {}) outside the {}x{} frame",
                                      bbox.x, bbox.y, bbox.w, bbox.h, frame.cols, frame.rows));
  }

  TrackerState state;
  state.config = config;
  state.center_x = bbox.center_x();
  state.center_y = bbox.center_y();
  state.base_w = bbox.w;
  state.base_h = bbox.h;
  state.frame_width = frame.cols;
  state.frame_height = frame.rows;

  const int g = config.feature_spec.grid_size;
  const cv::Mat patch = crop_region(frame, state.center_x, state.center_y,
                                    config.search_factor * bbox.w, config.search_factor * bbox.h,
                                    config.patch_size);
  const FeatureMap raw = extract_features(patch, config.feature_spec);
  state.pca = fit_pca(raw.data, std::min({raw.dim(), config.pca_dims, g * g}));

  auto spatial = std::make_shared<SpatialModel>();
  spatial->graph = build_grid_graph(g, g, config.neighborhood);
  const auto lap = normalized_laplacian(spatial->graph);
  PowerIterationOptions power;
  power.seed = config.seed;
  spatial->lap_tilde = scaled_laplacian(lap, estimate_lambda_max(lap, config.lambda_max_mode, power));
  // The candidate region is search_factor times the target on both axes, so
  // the target spans grid_size / search_factor cells either way.
  const double target_cells = g / config.search_factor;
  spatial->order = filter_order_for_target(target_cells, target_cells,
                                           config.neighborhood.skip_step, config.k_cap);
  spatial->label = gaussian_label_map(g, g, {g / 2, g / 2}, config.label_sigma_ratio * target_cells);
  state.spatial = std::move(spatial);

  const Matrix F = responses_for(state, project(raw.data, state.pca));
  state.model = fit_ridge(F, state.spatial->label.values, config.gamma, state.spatial->order,
                          SingularFallback::LeastSquares);
  state.frame_index = 1;
  return state;
}

Vector detection_response(const TrackerState& state, const cv::Mat& frame, double cx, double cy,
                          double target_w, double target_h) {
  const Matrix X = region_features(state, frame, cx, cy, target_w, target_h);
  return predict_response(responses_for(state, X), state.model);
}

double estimate_scale(const TrackerState& state, const cv::Mat& frame) {
  const auto& cfg = state.config;
  if (cfg.scale_count == 1) return 1.0;
  const auto [lo, hi] = scale_exponent_range(cfg.scale_count);
  int best_r = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int r = lo; r <= hi; ++r) {
    const double factor = std::pow(cfg.scale_step, r);
    const Vector response = detection_response(state, frame, state.center_x, state.center_y,
                                                state.target_w() * factor,
                                                state.target_h() * factor);
    const double score = response.maxCoeff();
    // Ties keep the candidate closest to the current scale.
    if (score > best_score || (score == best_score && std::abs(r) < std::abs(best_r))) {
      best_score = score;
      best_r = r;
    }
  }
  return std::pow(cfg.scale_step, best_r);
}

RegressionModel update_model(const RegressionModel& old_model, const RegressionModel& fresh,
                             double alpha) {
  if (old_model.weights.size() != fresh.weights.size()) {
    throw InvalidArgument(fmt::format("update_model: {} vs {} weights", old_model.weights.size(),
                                      fresh.weights.size()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  RegressionModel out = old_model;
  if (alpha == 0.0) return out;
  if (alpha == 1.0) return fresh;
  out.weights = (1.0 - alpha) * old_model.weights + alpha * fresh.weights;
  return out;
}

std::pair<TrackerState, BoundingBox> track_frame(const TrackerState& state,
                                                 const cv::Mat& frame) {
  check_frame(frame);
  if (state.frame_index < 1 || !state.spatial) {
    throw InvalidArgument("track_frame: tracker is not initialized");
  }
  if (frame.cols != state.frame_width || frame.rows != state.frame_height) {
    throw InvalidArgument(fmt::format("frame is {}x{}, sequence is {}x{}", frame.cols, frame.rows,
                                      state.frame_width, state.frame_height));
  }

  TrackerState next = state;
  const auto& cfg = state.config;
  const int g = cfg.feature_spec.grid_size;

  // Translation: peak of the candidate-region response, mapped to the
  // center of its lattice cell.
  const Vector response = detection_response(state, frame, state.center_x, state.center_y,
                                             state.target_w(), state.target_h());
  const GridPoint peak = locate_peak(response, g, g);
  const double region_w = cfg.search_factor * state.target_w();
  const double region_h = cfg.search_factor * state.target_h();
  next.center_x = state.center_x - 0.5 * region_w + (peak.col + 0.5) * region_w / g;
  next.center_y = state.center_y - 0.5 * region_h + (peak.row + 0.5) * region_h / g;
  next.center_x = std::clamp(next.center_x, 0.0, static_cast<double>(frame.cols));
  next.center_y = std::clamp(next.center_y, 0.0, static_cast<double>(frame.rows));

  // Scale, at the new center.
  const double factor = estimate_scale(next, frame);
  const double max_scale = std::max(frame.cols / next.base_w, frame.rows / next.base_h);
  const double min_scale = kMinTargetSide / std::min(next.base_w, next.base_h);
  next.scale = std::min(std::max(next.scale * factor, min_scale), std::max(max_scale, min_scale));

  // Refit at the new location and blend into the running model.
  next.model = update_model(state.model, fit_at(next, frame), cfg.alpha);
  next.frame_index = state.frame_index + 1;
  return {next, next.box()};
}

}  // namespace sft
