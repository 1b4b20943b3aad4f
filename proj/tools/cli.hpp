#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sft/tracker.hpp"

namespace sft::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kIoError = 3;
inline constexpr int kParseError = 4;
inline constexpr int kNumericError = 5;

struct TrackOptions {
  std::filesystem::path sequence_dir;
  std::optional<std::filesystem::path> config_file;
  std::optional<std::filesystem::path> manifest_file;
  std::optional<BoundingBox> init;  // 0-based
  std::optional<std::uint64_t> seed;
  // Falls back to the manifest's directory, then to "sft_out".
  std::optional<std::filesystem::path> output_dir;
};

struct EvalOptions {
  std::filesystem::path boxes_file;
  std::filesystem::path sequence_dir;
  std::filesystem::path output_dir = "sft_eval";
};

/// Writes boxes.txt, manifest.json and timing.json into the output
/// directory. Throws the library error types on failure.
void cmd_track(const TrackOptions& options, std::ostream& log);

/// Writes <sequence>.json, <sequence>.csv and summary.json.
void cmd_eval(const EvalOptions& options, std::ostream& log);

/// Returns kOk when every property passes.
int cmd_selftest(std::uint64_t seed, bool inject_fault, std::ostream& out);

/// Parses "x,y,w,h" (1-based, as in ground-truth files) into a 0-based box.
BoundingBox parse_init_box(const std::string& text);

/// Full command-line entry point; maps exceptions to exit statuses.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sft::cli
