#pragma once

#include <cmath>

#include <json.hpp>

namespace rulcast {

// JSON has no NaN/Infinity.
inline nlohmann::ordered_json finite_or_null(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

}  // namespace rulcast
