#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rulcast {

enum class Errc {
  io,                 // unreadable source / missing file
  parse,              // malformed input row or field
  parameter,          // caller-supplied parameter out of range
  missing_data,       // required measurements absent
  sizing_missing,     // issue without story points where CPV needs them
  insufficient_data,  // too few points to fit
  degenerate,         // zero-variance predictor or target
  training,           // classifier training precondition
  evaluation,         // classifier evaluation precondition
  plan_validation,    // inconsistent release plan
  unfittable_cluster, // projection hits a cluster without a model
  comparison,         // reports not comparable (mixed thresholds)
};

std::string_view errc_name(Errc code);

/// Base exception for every failure the toolkit reports to its callers.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Structured ingestion failure carrying the offending row (1-based, header
/// excluded) and field name.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string field, const std::string& what)
      : Error(Errc::parse, "row " + std::to_string(row) + ", field '" + field + "': " + what),
        row_(row),
        field_(std::move(field)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t row_;
  std::string field_;
};

}  // namespace rulcast
