#pragma once

// Run configuration: a flat `key = value` file (a TOML subset) whose
// relative paths resolve against the file's directory. Command-line flags
// override individual keys.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rulcast/horizon.hpp"
#include "rulcast/quarter_points.hpp"

namespace rulcast {

struct RunConfig {
  double threshold_ms = horizon::kDefaultThresholdMs;
  double alpha = 1.0;
  std::optional<std::size_t> k;
  std::size_t k_max = 6;
  std::uint64_t seed = 42;
  std::size_t restarts = 10;
  double train_fraction = 0.8;
  std::size_t fold_count = 2;
  std::size_t max_iter = 300;
  double tol = 1e-10;

  std::string issues;
  std::string rt_samples;
  std::string corpus;
  std::string sizer_model;
  std::string plans;
  std::string category_matrix;
  std::string stop_words;

  std::optional<std::string> environment;
  QuarterPoints base_cpv;
  horizon::FeatureSet features = horizon::FeatureSet::cumulative;

  std::string host = "127.0.0.1";
  int port = 8080;

  /// Throws Errc::parameter when a value is outside its module's range.
  void validate() const;
};

/// Sets one key. `base_dir` resolves relative paths (empty: leave as given).
void apply_setting(RunConfig& config, std::string_view key, std::string_view value, const std::string& base_dir = {});

RunConfig parse_config(std::string_view text, const std::string& base_dir = {});
RunConfig load_config(const std::string& path);

}  // namespace rulcast
