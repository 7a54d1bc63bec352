#include "rulcast/quarter_points.hpp"

#include <cmath>
#include <cstdlib>

#include "rulcast/error.hpp"

namespace rulcast {

QuarterPoints QuarterPoints::parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(Errc::parse, "empty CPV value");
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  std::int64_t whole = 0;
  std::size_t digits = 0;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i, ++digits) whole = whole * 10 + (s[i] - '0');
  // fraction scaled to ten-thousandths, enough to see any quarter
  std::int64_t frac = 0;
  std::int64_t scale = 1000;
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i, ++digits) {
      if (scale == 0) {
        if (s[i] != '0') throw Error(Errc::parse, "CPV value '" + s + "' is not a multiple of 0.25");
        continue;
      }
      frac += (s[i] - '0') * scale;
      scale /= 10;
    }
  }
  if (digits == 0 || i != s.size()) throw Error(Errc::parse, "malformed CPV value '" + s + "'");
  if (frac % 2500 != 0) throw Error(Errc::parse, "CPV value '" + s + "' is not a multiple of 0.25");
  std::int64_t q = whole * 4 + frac / 2500;
  return QuarterPoints(negative ? -q : q);
}

QuarterPoints QuarterPoints::from_double(double value) {
  double scaled = value * 4.0;
  if (!std::isfinite(scaled) || scaled != std::nearbyint(scaled))
    throw Error(Errc::parse, "CPV value is not a multiple of 0.25");
  return QuarterPoints(static_cast<std::int64_t>(scaled));
}

std::string QuarterPoints::str() const {
  std::int64_t mag = quarters_ < 0 ? -quarters_ : quarters_;
  std::string out = quarters_ < 0 ? "-" : "";
  out += std::to_string(mag / 4);
  switch (mag % 4) {
    case 1: out += ".25"; break;
    case 2: out += ".5"; break;
    case 3: out += ".75"; break;
    default: break;
  }
  return out;
}

}  // namespace rulcast
