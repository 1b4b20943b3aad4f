#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sft/tracker.hpp"

namespace sft {

// Flat "key = value" config files. Blank lines and '#' comments are ignored;
// every key is optional and falls back to the TrackerConfig default.
//
//   neighborhood       case1 | case2 | case3 | case4
//   skip_step          integer, defaults to the pattern's own step
//   weighting          binary | gaussian
//   gaussian_sigma     > 0, defaults to skip_step
//   channels           comma list of gray, color, hog
//   grid_size          odd integer
//   hog_bins, hog_cell
//   gamma, alpha, search_factor, label_sigma_ratio
//   scale_count, scale_step
//   lambda_max_mode    bound2 | power
//   k_cap, pca_dims, patch_size, seed

TrackerConfig parse_config(std::istream& in, const std::string& source = "config");
TrackerConfig load_config(const std::filesystem::path& file);

/// Every key, one per line, in a fixed order, with defaults resolved
/// (gaussian_sigma is written as its effective value).
std::string format_config(const TrackerConfig& config);

}  // namespace sft
