#include "sft/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>

namespace sft {

namespace fs = std::filesystem;

namespace {

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".pgm" ||
         ext == ".ppm";
}

nlohmann::json curve_json(const Curve& curve) {
  return {{"thresholds", curve.thresholds}, {"values", curve.values}};
}

void require_non_empty(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw InvalidArgument(fmt::format("{}: empty input", what));
}

}  // namespace

std::vector<fs::path> list_frames(const fs::path& dir) {
  const fs::path img = fs::is_directory(dir / "img") ? dir / "img" : dir;
  if (!fs::is_directory(img)) throw IoError(fmt::format("{}: not a directory", img.string()));
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(img)) {
    if (entry.is_regular_file() && is_image(entry.path())) frames.push_back(entry.path());
  }
  if (frames.empty()) throw IoError(fmt::format("{}: no image files", img.string()));
  std::sort(frames.begin(), frames.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return frames;
}

std::vector<MaybeBox> parse_boxes(std::istream& in, const std::string& source) {
  std::vector<MaybeBox> boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (auto& ch : line) {
      if (ch == ',' || ch == '\t' || ch == ';' || ch == '\r') ch = ' ';
    }
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) {
      throw ParseError(fmt::format("{}:{}: expected 4 values, found {}", source, line_no,
                                   tokens.size()));
    }
    double v[4];
    for (int i = 0; i < 4; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(tokens[i].c_str(), &end);
      if (end == tokens[i].c_str() || *end != '\0') {
        throw ParseError(fmt::format("{}:{}: '{}' is not a number", source, line_no, tokens[i]));
      }
    }
    const bool absent = std::any_of(v, v + 4, [](double x) { return !std::isfinite(x); }) ||
                        v[2] <= 0.0 || v[3] <= 0.0;
    if (absent) {
      boxes.emplace_back(std::nullopt);
    } else {
      boxes.emplace_back(BoundingBox{v[0] - 1.0, v[1] - 1.0, v[2], v[3]});
    }
  }
  return boxes;
}

std::vector<MaybeBox> read_boxes(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError(fmt::format("{}: cannot open", file.string()));
  return parse_boxes(in, file.string());
}

void write_boxes(std::ostream& out, const std::vector<BoundingBox>& boxes) {
  for (const auto& b : boxes) {
    out << fmt::format("{:.3f},{:.3f},{:.3f},{:.3f}\n", b.x + 1.0, b.y + 1.0, b.w, b.h);
  }
}

Sequence load_sequence(const fs::path& dir, bool require_ground_truth) {
  if (!fs::is_directory(dir)) throw IoError(fmt::format("{}: not a directory", dir.string()));
  Sequence seq;
  seq.name = fs::absolute(dir).lexically_normal().filename().string();
  if (seq.name.empty()) seq.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  seq.frame_paths = list_frames(dir);

  const fs::path gt = dir / "groundtruth_rect.txt";
  if (!fs::exists(gt)) {
    if (require_ground_truth) throw IoError(fmt::format("{}: missing", gt.string()));
    return seq;
  }
  seq.ground_truth = read_boxes(gt);
  if (seq.ground_truth.size() != seq.frame_paths.size()) {
    throw ParseError(fmt::format("{}: {} frames but {} ground-truth rectangles", dir.string(),
                                 seq.frame_paths.size(), seq.ground_truth.size()));
  }
  return seq;
}

cv::Mat load_frame(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw IoError(fmt::format("{}: cannot decode image", path.string()));
  return img;
}

double center_location_error(const BoundingBox& pred, const BoundingBox& gt) {
  return std::hypot(pred.center_x() - gt.center_x(), pred.center_y() - gt.center_y());
}

double overlap_ratio(const BoundingBox& pred, const BoundingBox& gt) {
  const double iw = std::min(pred.x + pred.w, gt.x + gt.w) - std::max(pred.x, gt.x);
  const double ih = std::min(pred.y + pred.h, gt.y + gt.h) - std::max(pred.y, gt.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = pred.area() + gt.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

std::vector<double> default_precision_thresholds() {
  std::vector<double> t(51);
  std::iota(t.begin(), t.end(), 0.0);
  return t;
}

std::vector<double> default_success_thresholds() {
  std::vector<double> t(21);
  for (int i = 0; i <= 20; ++i) t[i] = i / 20.0;
  return t;
}

Curve precision_curve(const std::vector<double>& cles, const std::vector<double>& thresholds) {
  require_non_empty(cles, "precision_curve");
  Curve curve{thresholds, {}};
  for (double t : thresholds) curve.values.push_back(precision_at(cles, t));
  return curve;
}

double precision_at(const std::vector<double>& cles, double threshold) {
  require_non_empty(cles, "precision_at");
  const auto hits = std::count_if(cles.begin(), cles.end(), [&](double e) { return e <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(cles.size());
}

Curve success_curve(const std::vector<double>& overlaps, const std::vector<double>& thresholds) {
  require_non_empty(overlaps, "success_curve");
  Curve curve{thresholds, {}};
  for (double t : thresholds) {
    const auto hits =
        std::count_if(overlaps.begin(), overlaps.end(), [&](double o) { return o > t; });
    curve.values.push_back(static_cast<double>(hits) / static_cast<double>(overlaps.size()));
  }
  return curve;
}

double success_auc(const std::vector<double>& overlaps) {
  const Curve curve = success_curve(overlaps, default_success_thresholds());
  return std::accumulate(curve.values.begin(), curve.values.end(), 0.0) /
         static_cast<double>(curve.values.size());
}

EvaluationResult evaluate(const std::vector<BoundingBox>& boxes, const Sequence& sequence) {
  if (sequence.ground_truth.empty()) {
    throw InvalidArgument(fmt::format("{}: no ground truth to evaluate against", sequence.name));
  }
  if (boxes.size() != sequence.ground_truth.size()) {
    throw InvalidArgument(fmt::format("{}: {} tracker boxes but {} ground-truth frames",
                                      sequence.name, boxes.size(), sequence.ground_truth.size()));
  }
  EvaluationResult result;
  result.sequence = sequence.name;
  std::vector<double> cles;
  std::vector<double> overlaps;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& gt = sequence.ground_truth[i];
    if (!gt) {
      ++result.excluded_frames;
      result.per_frame_cle.emplace_back(std::nullopt);
      result.per_frame_overlap.emplace_back(std::nullopt);
      continue;
    }
    cles.push_back(center_location_error(boxes[i], *gt));
    overlaps.push_back(overlap_ratio(boxes[i], *gt));
    result.per_frame_cle.emplace_back(cles.back());
    result.per_frame_overlap.emplace_back(overlaps.back());
  }
  if (cles.empty()) {
    throw InvalidArgument(fmt::format("{}: every ground-truth box is absent", sequence.name));
  }
  result.precision = precision_curve(cles, default_precision_thresholds());
  result.success = success_curve(overlaps, default_success_thresholds());
  result.precision_at_20 = precision_at(cles, kPrecisionThreshold);
  result.success_auc = success_auc(overlaps);
  result.mean_cle = std::accumulate(cles.begin(), cles.end(), 0.0) / static_cast<double>(cles.size());
  return result;
}

nlohmann::json to_json(const EvaluationResult& result) {
  auto optional_list = [](const std::vector<std::optional<double>>& values) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : values) out.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    return out;
  };
  return {{"sequence", result.sequence},
          {"frames", result.per_frame_cle.size()},
          {"excluded_frames", result.excluded_frames},
          {"precision_at_20", result.precision_at_20},
          {"success_auc", result.success_auc},
          {"mean_cle", result.mean_cle},
          {"precision_curve", curve_json(result.precision)},
          {"success_curve", curve_json(result.success)},
          {"per_frame_cle", optional_list(result.per_frame_cle)},
          {"per_frame_overlap", optional_list(result.per_frame_overlap)}};
}

void write_frame_csv(std::ostream& out, const EvaluationResult& result) {
  out << "frame,cle,overlap\n";
  for (std::size_t i = 0; i < result.per_frame_cle.size(); ++i) {
    const auto& cle = result.per_frame_cle[i];
    const auto& ov = result.per_frame_overlap[i];
    out << (i + 1) << ',' << (cle ? fmt::format("{:.6f}", *cle) : std::string()) << ','
        << (ov ? fmt::format("{:.6f}", *ov) : std::string()) << '\n';
  }
}

nlohmann::json summarize(const std::vector<EvaluationResult>& results) {
  nlohmann::json seqs = nlohmann::json::array();
  double precision = 0.0;
  double auc = 0.0;
  for (const auto& r : results) {
    seqs.push_back({{"sequence", r.sequence},
                    {"precision_at_20", r.precision_at_20},
                    {"success_auc", r.success_auc},
                    {"mean_cle", r.mean_cle},
                    {"excluded_frames", r.excluded_frames}});
    precision += r.precision_at_20;
    auc += r.success_auc;
  }
  const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
  return {{"sequence_count", results.size()},
          {"mean_precision_at_20", precision / n},
          {"mean_success_auc", auc / n},
          {"sequences", seqs}};
}

}  // namespace sft
