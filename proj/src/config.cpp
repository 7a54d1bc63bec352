#include "rulcast/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"

namespace rulcast {

namespace {

Error bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  return Error(Errc::parameter,
               "config key '" + std::string(key) + "': '" + std::string(value) + "' is not " + std::string(expected));
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) throw bad_value(key, value, "an integer");
  return out;
}

double parse_number(std::string_view key, std::string_view value) {
  std::string s(value);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    throw bad_value(key, value, "a number");
  }
  if (used != s.size() || !std::isfinite(out)) throw bad_value(key, value, "a number");
  return out;
}

std::string resolve(std::string_view value, const std::string& base_dir) {
  std::filesystem::path p{std::string(value)};
  if (value.empty() || p.is_absolute() || base_dir.empty()) return std::string(value);
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string unquote(std::string_view raw, std::size_t line) {
  std::string v = trim(raw);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'')) {
    if (v.back() != v.front())
      throw Error(Errc::parse, "config line " + std::to_string(line) + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  // Unquoted values may carry a trailing comment.
  if (auto hash = v.find('#'); hash != std::string::npos) v = trim(std::string_view(v).substr(0, hash));
  return v;
}

}  // namespace

void RunConfig::validate() const {
  if (!(threshold_ms > 0)) throw Error(Errc::parameter, "threshold_ms must be > 0");
  if (!(alpha > 0)) throw Error(Errc::parameter, "alpha must be > 0");
  if (k && *k < 1) throw Error(Errc::parameter, "k must be >= 1");
  if (k_max < 1) throw Error(Errc::parameter, "k_max must be >= 1");
  if (restarts < 1) throw Error(Errc::parameter, "restarts must be >= 1");
  if (!(train_fraction > 0 && train_fraction < 1)) throw Error(Errc::parameter, "train_fraction must lie in (0, 1)");
  if (fold_count < 2) throw Error(Errc::parameter, "fold_count must be >= 2");
  if (max_iter < 1) throw Error(Errc::parameter, "max_iter must be >= 1");
  if (!(tol >= 0)) throw Error(Errc::parameter, "tol must be >= 0");
  if (port < 0 || port > 65535) throw Error(Errc::parameter, "port must lie in 0..65535");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value, const std::string& base_dir) {
  if (key == "threshold_ms") c.threshold_ms = parse_number(key, value);
  else if (key == "alpha") c.alpha = parse_number(key, value);
  else if (key == "k") {
    if (value.empty() || value == "auto") c.k.reset();
    else c.k = parse_integer<std::size_t>(key, value);
  }
  else if (key == "k_max") c.k_max = parse_integer<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "restarts") c.restarts = parse_integer<std::size_t>(key, value);
  else if (key == "train_fraction") c.train_fraction = parse_number(key, value);
  else if (key == "fold_count") c.fold_count = parse_integer<std::size_t>(key, value);
  else if (key == "max_iter") c.max_iter = parse_integer<std::size_t>(key, value);
  else if (key == "tol") c.tol = parse_number(key, value);
  else if (key == "issues") c.issues = resolve(value, base_dir);
  else if (key == "rt_samples") c.rt_samples = resolve(value, base_dir);
  else if (key == "corpus") c.corpus = resolve(value, base_dir);
  else if (key == "sizer_model") c.sizer_model = resolve(value, base_dir);
  else if (key == "plans") c.plans = resolve(value, base_dir);
  else if (key == "category_matrix") c.category_matrix = resolve(value, base_dir);
  else if (key == "stop_words") c.stop_words = resolve(value, base_dir);
  else if (key == "environment") {
    if (value.empty()) c.environment.reset();
    else c.environment = std::string(value);
  }
  else if (key == "base_cpv") {
    try {
      c.base_cpv = QuarterPoints::parse(value);
    } catch (const Error&) {
      throw bad_value(key, value, "a multiple of 0.25");
    }
  }
  else if (key == "features") {
    if (value == "cumulative") c.features = horizon::FeatureSet::cumulative;
    else if (value == "cumulative+delta") c.features = horizon::FeatureSet::cumulative_delta;
    else throw bad_value(key, value, "'cumulative' or 'cumulative+delta'");
  }
  else if (key == "host") c.host = std::string(value);
  else if (key == "port") c.port = parse_integer<int>(key, value);
  else throw Error(Errc::parameter, "unknown config key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, const std::string& base_dir) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::parse, "config line " + std::to_string(line) + ": expected key = value");
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = unquote(std::string_view(s).substr(eq + 1), line);
    apply_setting(c, key, value, base_dir);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::string text = read_file(path);
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(text, dir);
}

}  // namespace rulcast
