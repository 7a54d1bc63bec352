#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace rulcast {

/// Exact CPV quantity counted in 0.25 units. Story points are integers and
/// impact factors are multiples of 0.25, so every CPV value is representable.
class QuarterPoints {
 public:
  constexpr QuarterPoints() = default;
  static constexpr QuarterPoints from_units(std::int64_t quarters) { return QuarterPoints(quarters); }

  /// Parses a decimal such as "-4.25" or "37"; throws Errc::parse when the
  /// value is not a multiple of 0.25.
  static QuarterPoints parse(std::string_view text);
  /// Converts a double that must be an exact multiple of 0.25.
  static QuarterPoints from_double(double value);

  constexpr std::int64_t units() const noexcept { return quarters_; }
  constexpr double value() const noexcept { return static_cast<double>(quarters_) / 4.0; }
  /// Decimal rendering with up to two fraction digits ("36.5", "-0.75", "37").
  std::string str() const;

  constexpr QuarterPoints operator-() const { return QuarterPoints(-quarters_); }
  constexpr QuarterPoints& operator+=(QuarterPoints o) {
    quarters_ += o.quarters_;
    return *this;
  }
  constexpr QuarterPoints& operator-=(QuarterPoints o) {
    quarters_ -= o.quarters_;
    return *this;
  }
  friend constexpr QuarterPoints operator+(QuarterPoints a, QuarterPoints b) { return a += b; }
  friend constexpr QuarterPoints operator-(QuarterPoints a, QuarterPoints b) { return a -= b; }
  friend constexpr auto operator<=>(QuarterPoints, QuarterPoints) = default;

 private:
  constexpr explicit QuarterPoints(std::int64_t q) : quarters_(q) {}
  std::int64_t quarters_ = 0;
};

}  // namespace rulcast
