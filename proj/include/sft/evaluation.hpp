#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sft/tracker.hpp"

namespace sft {

/// Ground-truth entry; nullopt for frames whose box is NaN or empty.
using MaybeBox = std::optional<BoundingBox>;

struct Sequence {
  std::string name;
  std::vector<std::filesystem::path> frame_paths;
  std::vector<MaybeBox> ground_truth;  // empty when the sequence has none
  std::vector<std::string> attributes;
};

/// Image files under `<dir>/img` (or `<dir>` itself when there is no img/),
/// sorted by filename. Throws IoError when none are found.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Parses "x,y,w,h" rectangles (comma, tab or whitespace separated,
/// 1-based) into 0-based boxes. NaN or non-positive sizes yield nullopt.
std::vector<MaybeBox> parse_boxes(std::istream& in, const std::string& source);
std::vector<MaybeBox> read_boxes(const std::filesystem::path& file);

/// Writes boxes in the same 1-based "x,y,w,h" format.
void write_boxes(std::ostream& out, const std::vector<BoundingBox>& boxes);

/// Loads an OTB-style sequence directory (`img/` + `groundtruth_rect.txt`).
/// With require_ground_truth = false a missing rectangle file is allowed.
Sequence load_sequence(const std::filesystem::path& dir, bool require_ground_truth = true);

cv::Mat load_frame(const std::filesystem::path& path);

double center_location_error(const BoundingBox& pred, const BoundingBox& gt);
double overlap_ratio(const BoundingBox& pred, const BoundingBox& gt);

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

/// 0, 1, ..., 50 pixels.
std::vector<double> default_precision_thresholds();
/// 0, 0.05, ..., 1.0.
std::vector<double> default_success_thresholds();

/// Fraction of frames with CLE <= threshold.
Curve precision_curve(const std::vector<double>& cles, const std::vector<double>& thresholds);
double precision_at(const std::vector<double>& cles, double threshold);

/// Fraction of frames with overlap > threshold.
Curve success_curve(const std::vector<double>& overlaps, const std::vector<double>& thresholds);
/// Mean of the success curve on the default 21-point grid.
double success_auc(const std::vector<double>& overlaps);

inline constexpr double kPrecisionThreshold = 20.0;

struct EvaluationResult {
  std::string sequence;
  // One entry per frame; nullopt where ground truth is absent.
  std::vector<std::optional<double>> per_frame_cle;
  std::vector<std::optional<double>> per_frame_overlap;
  int excluded_frames = 0;
  double precision_at_20 = 0.0;
  double success_auc = 0.0;
  double mean_cle = 0.0;
  Curve precision;
  Curve success;
};

/// One-pass evaluation of tracker output against the sequence ground truth.
EvaluationResult evaluate(const std::vector<BoundingBox>& boxes, const Sequence& sequence);

nlohmann::json to_json(const EvaluationResult& result);
void write_frame_csv(std::ostream& out, const EvaluationResult& result);

/// Mean scores plus per-sequence summaries.
nlohmann::json summarize(const std::vector<EvaluationResult>& results);

}  // namespace sft
