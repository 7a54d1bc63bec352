#include "rulcast/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rulcast/error.hpp"

namespace rulcast {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::parameter: return "parameter";
    case Errc::missing_data: return "missing-data";
    case Errc::sizing_missing: return "sizing-missing";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::degenerate: return "degenerate";
    case Errc::training: return "training";
    case Errc::evaluation: return "evaluation";
    case Errc::plan_validation: return "plan-validation";
    case Errc::unfittable_cluster: return "unfittable-cluster";
    case Errc::comparison: return "comparison";
  }
  return "unknown";
}

Version::Version(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw Error(Errc::parse, "empty version string");
  std::size_t start = 0;
  while (start <= text_.size()) {
    std::size_t dot = text_.find('.', start);
    std::string_view part(text_.data() + start,
                          (dot == std::string::npos ? text_.size() : dot) - start);
    if (part.empty() || !std::all_of(part.begin(), part.end(),
                                     [](unsigned char c) { return std::isdigit(c); }))
      throw Error(Errc::parse, "malformed version '" + text_ + "'");
    parts_.push_back(std::stoll(std::string(part)));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
}

int Version::compare(const Version& other) const {
  std::size_t n = std::max(parts_.size(), other.parts_.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t a = i < parts_.size() ? parts_[i] : 0;
    std::int64_t b = i < other.parts_.size() ? other.parts_[i] : 0;
    if (a != b) return a < b ? -1 : 1;
  }
  return 0;
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng& rng, std::size_t bound) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t range = bound;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % range);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 over the mixed inputs
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1) + 0xBF58476D1CE4E5B9ull * index;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string format_fixed(double value, int fraction_digits) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", fraction_digits, value);
  std::string out(buf);
  if (out == "-0" || out.find_first_not_of("-0.") == std::string::npos) {
    if (out.front() == '-') out.erase(0, 1);
  }
  return out;
}

std::string format_trimmed(double value, int max_fraction_digits) {
  std::string out = format_fixed(value, max_fraction_digits);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0, e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

bool CsvReader::next(CsvRow& row) {
  row.clear();
  if (in_.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  ++line_;
  for (;;) {
    int ch = in_.get();
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) throw ParseError(line_, "<record>", "unterminated quoted field");
      if (any || !field.empty() || !row.empty()) row.push_back(std::move(field));
      return !row.empty();
    }
    any = true;
    char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in_.peek() == '\n') in_.get();
      row.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(row[i]);
  }
  out << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rulcast
