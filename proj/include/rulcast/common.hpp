#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace rulcast {

/// Dotted release identifier ("5.0.4"). Ordering is numeric per component with
/// missing trailing components treated as zero, so "4.4" == "4.4.0".
class Version {
 public:
  Version() = default;
  explicit Version(std::string text);

  const std::string& str() const noexcept { return text_; }
  const std::vector<std::int64_t>& parts() const noexcept { return parts_; }

  friend bool operator==(const Version& a, const Version& b) { return a.compare(b) == 0; }
  friend bool operator<(const Version& a, const Version& b) { return a.compare(b) < 0; }
  friend bool operator>(const Version& a, const Version& b) { return b < a; }
  friend bool operator<=(const Version& a, const Version& b) { return !(b < a); }
  friend bool operator>=(const Version& a, const Version& b) { return !(a < b); }
  friend bool operator!=(const Version& a, const Version& b) { return !(a == b); }

 private:
  int compare(const Version& other) const;

  std::string text_;
  std::vector<std::int64_t> parts_;
};

// Portable draws from a 64-bit Mersenne twister. std::uniform_*_distribution
// is implementation-defined, which would break byte-identical outputs.
using Rng = std::mt19937_64;

double uniform01(Rng& rng);
std::size_t uniform_index(Rng& rng, std::size_t bound);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Fixed-point rendering with trailing zeros (and a bare '.') removed.
std::string format_trimmed(double value, int max_fraction_digits);
std::string format_fixed(double value, int fraction_digits);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

// ---------------------------------------------------------------------------
// CSV (RFC 4180 quoting, LF or CRLF line ends)

using CsvRow = std::vector<std::string>;

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record; false at end of input.
  bool next(CsvRow& row);
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const CsvRow& row);

std::string read_file(const std::string& path);

}  // namespace rulcast
