#include "sft/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace sft {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const auto& e = entries_.at(key);
    throw ParseError(fmt::format("{}:{}: key '{}': {}", source_, e.line, key, why));
  }

  template <typename T>
  void read(const std::string& key, T& out) const {
    if (!has(key)) return;
    const std::string& text = entries_.at(key).value;
    if constexpr (std::is_floating_point_v<T>) {
      std::size_t used = 0;
      try {
        out = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != text.size() || text.empty()) fail(key, fmt::format("'{}' is not a number", text));
    } else {
      const auto* end = text.data() + text.size();
      const auto [ptr, ec] = std::from_chars(text.data(), end, out);
      if (ec != std::errc() || ptr != end) fail(key, fmt::format("'{}' is not an integer", text));
    }
  }

  template <typename F>
  void read_with(const std::string& key, F&& parse) const {
    if (!has(key)) return;
    try {
      parse(entries_.at(key).value);
    } catch (const InvalidArgument& e) {
      fail(key, e.what());
    }
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

const char* const kKeys[] = {"neighborhood", "skip_step",     "weighting",       "gaussian_sigma",
                             "channels",     "grid_size",     "hog_bins",        "hog_cell",
                             "gamma",        "alpha",         "search_factor",   "label_sigma_ratio",
                             "scale_count",  "scale_step",    "lambda_max_mode", "k_cap",
                             "pca_dims",     "patch_size",    "seed"};

bool known_key(const std::string& key) {
  for (const char* k : kKeys) {
    if (key == k) return true;
  }
  return false;
}

}  // namespace

TrackerConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ParseError(fmt::format("{}:{}: unknown key '{}'", source, line_no, key));
    if (entries.count(key)) {
      throw ParseError(fmt::format("{}:{}: key '{}' given twice", source, line_no, key));
    }
    entries[key] = {value, line_no};
  }

  const Reader reader(std::move(entries), source);
  TrackerConfig cfg;
  reader.read_with("neighborhood", [&](const std::string& v) {
    cfg.neighborhood.pattern = parse_pattern(v);
    cfg.neighborhood.skip_step = default_skip_step(cfg.neighborhood.pattern);
  });
  reader.read("skip_step", cfg.neighborhood.skip_step);
  reader.read_with("weighting",
                   [&](const std::string& v) { cfg.neighborhood.weighting = parse_weighting(v); });
  reader.read("gaussian_sigma", cfg.neighborhood.gaussian_sigma);
  reader.read_with("channels", [&](const std::string& v) {
    cfg.feature_spec.channels.clear();
    std::stringstream list(v);
    for (std::string item; std::getline(list, item, ',');) {
      cfg.feature_spec.channels.push_back(parse_feature_channel(trim(item)));
    }
  });
  reader.read("grid_size", cfg.feature_spec.grid_size);
  reader.read("hog_bins", cfg.feature_spec.hog_bins);
  reader.read("hog_cell", cfg.feature_spec.hog_cell);
  reader.read("gamma", cfg.gamma);
  reader.read("alpha", cfg.alpha);
  reader.read("search_factor", cfg.search_factor);
  reader.read("label_sigma_ratio", cfg.label_sigma_ratio);
  reader.read("scale_count", cfg.scale_count);
  reader.read("scale_step", cfg.scale_step);
  reader.read_with("lambda_max_mode",
                   [&](const std::string& v) { cfg.lambda_max_mode = parse_lambda_max_mode(v); });
  reader.read("k_cap", cfg.k_cap);
  reader.read("pca_dims", cfg.pca_dims);
  reader.read("patch_size", cfg.patch_size);
  reader.read("seed", cfg.seed);

  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(fmt::format("{}: {}", source, e.what()));
  }
  return cfg;
}

TrackerConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError(fmt::format("{}: cannot open", file.string()));
  return parse_config(in, file.string());
}

std::string format_config(const TrackerConfig& c) {
  std::string channels;
  for (const auto ch : c.feature_spec.channels) {
    if (!channels.empty()) channels += ',';
    channels += to_string(ch);
  }
  std::string out;
  auto line = [&](const char* key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  auto real = [](double v) { return fmt::format("{:.17g}", v); };
  line("neighborhood", to_string(c.neighborhood.pattern));
  line("skip_step", std::to_string(c.neighborhood.skip_step));
  line("weighting", to_string(c.neighborhood.weighting));
  line("gaussian_sigma", real(c.neighborhood.effective_sigma()));
  line("channels", channels);
  line("grid_size", std::to_string(c.feature_spec.grid_size));
  line("hog_bins", std::to_string(c.feature_spec.hog_bins));
  line("hog_cell", std::to_string(c.feature_spec.hog_cell));
  line("gamma", real(c.gamma));
  line("alpha", real(c.alpha));
  line("search_factor", real(c.search_factor));
  line("label_sigma_ratio", real(c.label_sigma_ratio));
  line("scale_count", std::to_string(c.scale_count));
  line("scale_step", real(c.scale_step));
  line("lambda_max_mode", to_string(c.lambda_max_mode));
  line("k_cap", std::to_string(c.k_cap));
  line("pca_dims", std::to_string(c.pca_dims));
  line("patch_size", std::to_string(c.patch_size));
  line("seed", std::to_string(c.seed));
  return out;
}

}  // namespace sft
