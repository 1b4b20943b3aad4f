#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "sft/config.hpp"
#include "sft/evaluation.hpp"
#include "sft/selftest.hpp"

namespace sft::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Manifest {
  std::string tool_version;
  fs::path sequence;
  fs::path output_dir;
  std::uint64_t seed = 0;
  BoundingBox init;
  TrackerConfig config;
};

json config_json(const TrackerConfig& config) {
  json out = json::object();
  std::istringstream lines(format_config(config));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

TrackerConfig config_from_json(const json& object, const std::string& source) {
  std::string text;
  for (const auto& [key, value] : object.items()) {
    text += key + " = " + value.get<std::string>() + "\n";
  }
  std::istringstream in(text);
  return parse_config(in, source);
}

json box_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

std::string manifest_text(const Manifest& m) {
  json j;
  j["tool"] = "sft";
  j["tool_version"] = m.tool_version;
  j["sequence"] = m.sequence.string();
  j["output_dir"] = m.output_dir.string();
  j["seed"] = m.seed;
  j["init_box"] = box_json(m.init);
  j["config"] = config_json(m.config);
  return j.dump(2) + "\n";
}

Manifest read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError(fmt::format("{}: cannot open", file.string()));
  try {
    const json j = json::parse(in);
    Manifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.sequence = j.at("sequence").get<std::string>();
    m.output_dir = j.at("output_dir").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& b = j.at("init_box");
    m.init = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
              b.at(3).get<double>()};
    m.config = config_from_json(j.at("config"), file.string());
    m.config.seed = m.seed;
    return m;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", file.string(), e.what()));
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("{}: cannot write", path.string()));
  out << content;
  if (!out) throw IoError(fmt::format("{}: write failed", path.string()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("{}: {}", dir.string(), ec.message()));
}

}  // namespace

BoundingBox parse_init_box(const std::string& text) {
  std::istringstream in(text);
  const auto boxes = parse_boxes(in, "--init");
  if (boxes.size() != 1 || !boxes.front()) {
    throw ParseError(fmt::format("--init: expected x,y,w,h with positive size, got '{}'", text));
  }
  return *boxes.front();
}

void cmd_track(const TrackOptions& options, std::ostream& log) {
  Manifest m;
  m.tool_version = kToolVersion;
  if (options.manifest_file) {
    m = read_manifest(*options.manifest_file);
    m.tool_version = kToolVersion;
  }
  if (!options.sequence_dir.empty()) m.sequence = fs::absolute(options.sequence_dir).lexically_normal();
  if (m.sequence.empty()) throw InvalidArgument("track: no sequence directory given");
  if (options.config_file) m.config = load_config(*options.config_file);
  if (options.seed) m.config.seed = *options.seed;
  m.seed = m.config.seed;
  m.output_dir = options.output_dir ? *options.output_dir
                 : options.manifest_file ? m.output_dir
                                         : fs::path("sft_out");

  const Sequence seq = load_sequence(m.sequence, /*require_ground_truth=*/false);
  if (options.init) {
    m.init = *options.init;
  } else if (!options.manifest_file) {
    if (seq.ground_truth.empty()) {
      throw InvalidArgument(fmt::format("{}: no groundtruth_rect.txt; pass --init x,y,w,h",
                                        m.sequence.string()));
    }
    if (!seq.ground_truth.front()) {
      throw InvalidArgument("first ground-truth box is absent; pass --init x,y,w,h");
    }
    m.init = *seq.ground_truth.front();
  }

  ensure_dir(m.output_dir);
  const auto start = std::chrono::steady_clock::now();
  std::vector<BoundingBox> boxes;
  boxes.reserve(seq.frame_paths.size());
  TrackerState state = init_tracker(load_frame(seq.frame_paths.front()), m.init, m.config);
  boxes.push_back(m.init);
  for (std::size_t i = 1; i < seq.frame_paths.size(); ++i) {
    auto [next, box] = track_frame(state, load_frame(seq.frame_paths[i]));
    state = std::move(next);
    boxes.push_back(box);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream box_text;
  write_boxes(box_text, boxes);
  write_file(m.output_dir / "boxes.txt", box_text.str());
  write_file(m.output_dir / "manifest.json", manifest_text(m));
  const double fps = seconds > 0.0 ? static_cast<double>(boxes.size()) / seconds : 0.0;
  write_file(m.output_dir / "timing.json",
             json{{"frames", boxes.size()}, {"seconds", seconds}, {"fps", fps}}.dump(2) + "\n");
  log << fmt::format("tracked {} frames of {} in {:.2f} s ({:.1f} fps) -> {}\n", boxes.size(),
                     seq.name, seconds, fps, m.output_dir.string());
}

void cmd_eval(const EvalOptions& options, std::ostream& log) {
  const Sequence seq = load_sequence(options.sequence_dir);
  const auto parsed = read_boxes(options.boxes_file);
  if (parsed.empty()) throw ParseError(fmt::format("{}: no boxes", options.boxes_file.string()));
  std::vector<BoundingBox> boxes;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (!parsed[i]) {
      throw ParseError(fmt::format("{}:{}: tracker box is empty or NaN",
                                   options.boxes_file.string(), i + 1));
    }
    boxes.push_back(*parsed[i]);
  }
  const EvaluationResult result = evaluate(boxes, seq);

  ensure_dir(options.output_dir);
  write_file(options.output_dir / (seq.name + ".json"), to_json(result).dump(2) + "\n");
  std::ostringstream csv;
  write_frame_csv(csv, result);
  write_file(options.output_dir / (seq.name + ".csv"), csv.str());
  write_file(options.output_dir / "summary.json", summarize({result}).dump(2) + "\n");
  log << fmt::format("{}: precision@20 = {:.3f}, success AUC = {:.3f}, mean CLE = {:.2f} px\n",
                     seq.name, result.precision_at_20, result.success_auc, result.mean_cle);
}

int cmd_selftest(std::uint64_t seed, bool inject_fault, std::ostream& out) {
  SelfTestOptions options;
  options.seed = seed;
  options.fault = inject_fault ? FaultInjection::PerturbedRecurrence : FaultInjection::None;
  const auto reports = run_selftest(options);
  out << format_report(reports);
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
  return ok ? kOk : kCheckFailed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral filter tracking on pixel-grid graphs"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  TrackOptions track;
  std::string sequence_dir;
  std::string init_text;
  auto* track_cmd = app.add_subcommand("track", "Track the target through a sequence");
  track_cmd->add_option("sequence_dir", sequence_dir, "Sequence directory (img/ + groundtruth_rect.txt)");
  track_cmd->add_option("--config", track.config_file, "Key/value config file");
  track_cmd->add_option("--manifest", track.manifest_file, "Re-run from a manifest.json");
  track_cmd->add_option("--init", init_text, "Initial box x,y,w,h (1-based)");
  track_cmd->add_option("--seed", track.seed, "Seed for randomized components");
  track_cmd->add_option("--out", track.output_dir, "Output directory");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score tracker boxes against ground truth");
  eval_cmd->add_option("boxes", eval.boxes_file, "Tracker boxes file")->required();
  eval_cmd->add_option("sequence_dir", eval.sequence_dir, "Sequence directory")->required();
  eval_cmd->add_option("--out", eval.output_dir, "Output directory");

  std::uint64_t seed = 0;
  bool inject_fault = false;
  auto* self_cmd = app.add_subcommand("selftest", "Run the numerical property checks");
  self_cmd->add_option("--seed", seed, "Seed for the random instances");
  self_cmd->add_flag("--inject-fault", inject_fault, "Break the recurrence (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (*track_cmd) {
      if (sequence_dir.empty() && !track.manifest_file) {
        err << "track: a sequence directory or --manifest is required\n";
        return kUsageError;
      }
      track.sequence_dir = sequence_dir;
      if (!init_text.empty()) track.init = parse_init_box(init_text);
      cmd_track(track, out);
      return kOk;
    }
    if (*eval_cmd) {
      cmd_eval(eval, out);
      return kOk;
    }
    return cmd_selftest(seed, inject_fault, out);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kUsageError;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace sft::cli
