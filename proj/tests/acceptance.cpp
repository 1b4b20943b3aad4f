// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "synthetic.hpp"
#include "sft/evaluation.hpp"
#include "sft/selftest.hpp"

namespace {

using namespace sft;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome with_budget(const PropertyReport& r, double elapsed, double budget) {
  const bool fast = elapsed < budget;
  return {r.passed && fast, fmt::format("{} cases, worst {:.3g} (tol {:.0e}), {:.2f} s (limit {:.0f} s){}",
                                        r.cases, r.worst, r.tolerance, elapsed, budget,
                                        r.passed ? "" : " | " + r.detail)};
}

Outcome spectral_equivalence() {
  const auto start = Clock::now();
  const auto r = check_spectral_equivalence(2024, 60, 1e-8);
  return with_budget(r, seconds_since(start), 10.0);
}

Outcome khop_locality() {
  const auto start = Clock::now();
  const auto r = check_khop_locality(2024, 10, 8, 1e-12);
  return with_budget(r, seconds_since(start), 10.0);
}

Outcome ridge_oracle() {
  const auto start = Clock::now();
  const auto r = check_ridge_oracle(2024, 100, 1e-8, 1e-6);
  return with_budget(r, seconds_since(start), 5.0);
}

Outcome first_order_degeneration() {
  testing::SyntheticScene scene;
  const auto seq = testing::make_translating_sequence(scene, 1, 100.0, 60.0, 0.0, 0.0);
  TrackerConfig cfg;
  cfg.k_cap = 1;
  const auto state = init_tracker(seq.frames[0], seq.truth[0], cfg);
  const auto& b = seq.truth[0];
  const Matrix X = region_features(state, seq.frames[0], b.center_x(), b.center_y(), b.w, b.h);
  const auto direct = fit_ridge(X, state.spatial->label.values, cfg.gamma);
  const double diff = (state.model.weights - direct.weights).cwiseAbs().maxCoeff();
  return {state.spatial->order == 1 && diff <= 1e-10,
          fmt::format("K = {}, {} weights, max |w_pipeline - w_ridge| = {:.3g}",
                      state.spatial->order, direct.weights.size(), diff)};
}

struct RunStats {
  std::vector<BoundingBox> boxes;
  std::vector<double> scales;
};

RunStats run_tracker(const testing::SyntheticSequence& seq, const TrackerConfig& cfg) {
  RunStats stats;
  auto state = init_tracker(seq.frames[0], seq.truth[0], cfg);
  stats.boxes.push_back(state.box());
  stats.scales.push_back(state.scale);
  for (std::size_t t = 1; t < seq.frames.size(); ++t) {
    auto [next, box] = track_frame(state, seq.frames[t]);
    state = std::move(next);
    stats.boxes.push_back(box);
    stats.scales.push_back(state.scale);
  }
  return stats;
}

Outcome synthetic_tracking() {
  const auto start = Clock::now();
  testing::SyntheticScene scene;  // 240 x 160, 30 x 30 target
  const TrackerConfig cfg;

  const auto moving = testing::make_translating_sequence(scene, 50, 20.0, 60.0, 2.0, 0.0);
  const auto run = run_tracker(moving, cfg);
  std::vector<double> cles;
  for (std::size_t t = 0; t < run.boxes.size(); ++t) {
    cles.push_back(center_location_error(run.boxes[t], moving.truth[t]));
  }
  double mean = 0.0;
  for (double c : cles) mean += c;
  mean /= static_cast<double>(cles.size());
  const double p20 = precision_at(cles, 20.0);

  const auto still = testing::make_translating_sequence(scene, 20, 100.0, 60.0, 0.0, 0.0);
  const auto still_run = run_tracker(still, cfg);
  double worst_static = 0.0;
  for (std::size_t t = 0; t < still_run.boxes.size(); ++t) {
    worst_static = std::max(worst_static, center_location_error(still_run.boxes[t], still.truth[t]));
  }
  // Pyramid exponent picked on each static frame, recovered from the scale ratio.
  int unit_picks = 0;
  for (std::size_t t = 1; t < still_run.scales.size(); ++t) {
    const double r = std::log(still_run.scales[t] / still_run.scales[t - 1]) / std::log(cfg.scale_step);
    if (std::lround(r) == 0) ++unit_picks;
  }
  const int static_frames = static_cast<int>(still_run.scales.size()) - 1;

  const double elapsed = seconds_since(start);
  const bool ok = mean <= 3.0 && p20 == 1.0 && worst_static == 0.0 && elapsed < 60.0;
  return {ok, fmt::format("translating: mean CLE {:.3f} px, precision@20 {:.3f}; static: max CLE "
                          "{:.3g} px, r* = 0 on {}/{} frames; {:.1f} s (limit 60 s)",
                          mean, p20, worst_static, unit_picks, static_frames, elapsed)};
}

Outcome scale_pyramid() {
  const TrackerConfig cfg;
  const auto factors = scale_factors(cfg.scale_count, cfg.scale_step);
  const bool grid_ok = factors.size() == 33 && std::abs(factors.front() - 0.7284) < 5e-5 &&
                       std::abs(factors.back() - 1.3728) < 5e-5;

  testing::SyntheticScene scene;
  scene.width = 240;
  scene.height = 200;
  const auto zoom = testing::make_zoom_sequence(scene, 21, 120.0, 100.0, 1.02);
  const auto run = run_tracker(zoom, cfg);
  const double truth = std::pow(1.02, 20);
  const double estimate = run.scales.back();
  const double rel = estimate / truth - 1.0;
  return {grid_ok && std::abs(rel) <= 0.10,
          fmt::format("{} candidates [{:.4f} .. {:.4f}]; zoom after 20 frames: estimate {:.4f} vs "
                      "{:.4f} ({:+.1f}%, limit +-10%)",
                      factors.size(), factors.front(), factors.back(), estimate, truth, 100.0 * rel)};
}

Outcome filter_order_table() {
  struct Row {
    double h, w;
    int skip;
    int expected;
  };
  // Expected values worked by hand: max(h, w) for skip 1, ceil(max(h, w) / s) otherwise.
  const Row rows[] = {
      {40, 30, 1, 40}, {40, 30, 2, 20}, {1, 1, 1, 1},   {30, 40, 1, 40}, {30, 40, 3, 14},
      {23.75, 23.75, 2, 12}, {23.75, 23.75, 3, 8}, {23.75, 23.75, 1, 24}, {7, 3, 2, 4},
      {3, 7, 2, 4},    {9, 9, 3, 3},    {10, 9, 3, 4},  {12, 5, 4, 3},   {13, 5, 4, 4},
      {2, 2, 3, 1},    {57, 57, 1, 57}, {57, 20, 2, 29}, {100, 1, 3, 34}, {6, 6, 2, 3},
      {5.5, 2, 1, 6}};
  int matched = 0;
  std::string misses;
  for (const auto& r : rows) {
    const int k = filter_order_for_target(r.h, r.w, r.skip, 1000);
    if (k == r.expected) {
      ++matched;
    } else {
      misses += fmt::format(" ({}, {}, {}) -> {} expected {};", r.h, r.w, r.skip, k, r.expected);
    }
  }
  const int total = static_cast<int>(std::size(rows));
  return {matched == total, fmt::format("{}/{} triples match{}", matched, total, misses)};
}

Outcome metric_fixtures() {
  struct Pair {
    BoundingBox a, b;
    double cle, iou;
  };
  const Pair pairs[] = {
      {{0, 0, 2, 2}, {1, 0, 2, 2}, 1.0, 1.0 / 3.0},
      {{0, 0, 10, 10}, {0, 0, 10, 10}, 0.0, 1.0},
      {{0, 0, 10, 10}, {3, 4, 10, 10}, 5.0, 42.0 / 158.0},
      {{0, 0, 2, 2}, {2, 0, 2, 2}, 2.0, 0.0},
      {{0, 0, 1, 1}, {5, 5, 1, 1}, std::sqrt(50.0), 0.0},
      {{0, 0, 4, 4}, {1, 1, 2, 2}, 0.0, 0.25},
      {{0, 0, 4, 2}, {2, 0, 4, 2}, 2.0, 1.0 / 3.0},
      {{10, 10, 6, 4}, {13, 12, 6, 4}, std::sqrt(13.0), 6.0 / 42.0},
      {{0, 0, 8, 8}, {0, 0, 4, 8}, 2.0, 0.5},
      {{-2, -2, 4, 4}, {0, 0, 4, 4}, std::sqrt(8.0), 4.0 / 28.0}};
  int matched = 0;
  for (const auto& p : pairs) {
    if (std::abs(center_location_error(p.a, p.b) - p.cle) <= 1e-12 &&
        std::abs(overlap_ratio(p.a, p.b) - p.iou) <= 1e-12) {
      ++matched;
    }
  }
  Sequence seq;
  seq.name = "perfect";
  std::vector<BoundingBox> boxes;
  for (int t = 0; t < 30; ++t) {
    const BoundingBox b{3.0 * t, 2.0 * t, 20.0 + t, 15.0};
    seq.ground_truth.emplace_back(b);
    boxes.push_back(b);
  }
  seq.frame_paths.resize(boxes.size());
  const auto result = evaluate(boxes, seq);
  const bool perfect_ok =
      result.precision_at_20 == 1.0 && std::abs(result.success_auc - 20.0 / 21.0) <= 1e-12;
  return {matched == 10 && perfect_ok,
          fmt::format("{}/10 fixture pairs exact; perfect tracking: precision@20 {:.3f}, AUC {:.6f} "
                      "(20/21 = {:.6f})",
                      matched, result.precision_at_20, result.success_auc, 20.0 / 21.0)};
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "sft_acceptance_determinism";
  fs::remove_all(root);
  testing::SyntheticScene scene;
  testing::write_sequence(testing::make_translating_sequence(scene, 10, 40.0, 50.0, 2.0, 1.0),
                          root / "Synthetic", true);

  std::ostringstream log;
  cli::TrackOptions seed_run;
  seed_run.sequence_dir = root / "Synthetic";
  seed_run.seed = 7;
  seed_run.output_dir = root / "seed";
  cli::cmd_track(seed_run, log);

  const fs::path manifest = root / "seed" / "manifest.json";
  std::vector<std::string> outputs;
  for (const char* name : {"first", "second"}) {
    cli::TrackOptions rerun;
    rerun.manifest_file = manifest;
    rerun.output_dir = root / name;
    cli::cmd_track(rerun, log);
    outputs.push_back(slurp(root / name / "boxes.txt"));
  }
  const bool ok = !outputs[0].empty() && outputs[0] == outputs[1];
  const auto bytes = outputs[0].size();
  fs::remove_all(root);
  return {ok, fmt::format("two manifest re-runs: {} bytes each, {}", bytes,
                          ok ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spectral equivalence", spectral_equivalence},
      {"k-hop locality", khop_locality},
      {"ridge oracle", ridge_oracle},
      {"K = 1 degeneration", first_order_degeneration},
      {"synthetic tracking", synthetic_tracking},
      {"scale pyramid", scale_pyramid},
      {"filter-order rule", filter_order_table},
      {"metric fixtures", metric_fixtures},
      {"determinism", determinism}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    if (!outcome.passed) ++failures;
    fmt::print("{} [{}] {}: {}\n", outcome.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
               outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
