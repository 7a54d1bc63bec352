#pragma once

// Consolidated Predictive Variable: signed, impact-weighted story points per
// release, accumulated over the release sequence. All arithmetic is exact in
// quarter points.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rulcast/corpus.hpp"
#include "rulcast/quarter_points.hpp"

namespace rulcast::cpv {

/// sign * SP * IF for one issue. Throws Errc::sizing_missing naming the issue
/// when it has no story points.
QuarterPoints contribution(const corpus::IssueRecord& issue, const corpus::ImpactFactorTable& factors);

QuarterPoints release_delta(const std::vector<corpus::IssueRecord>& issues,
                            const corpus::ImpactFactorTable& factors = {});

/// Prefix sums of `deltas` starting from `base`; same length as `deltas`.
std::vector<QuarterPoints> cumulative_series(QuarterPoints base, const std::vector<QuarterPoints>& deltas);

struct ReleaseRecord {
  std::string version;
  std::size_t ordinal = 0;
  std::vector<std::string> issue_ids;
  QuarterPoints delta;
  QuarterPoints cumulative;
};

struct HistoryOptions {
  QuarterPoints base;  // cumulative value before the first release
  // Repair markers: the cumulative value entering the named release is reset
  // to the given base.
  std::map<std::string, QuarterPoints> resets;
};

/// Builds the release history in version order. `versions` lists releases
/// that must appear even without issues (e.g. releases with RT samples);
/// every resolved issue's release is added as well.
std::vector<ReleaseRecord> build_history(const std::vector<corpus::IssueRecord>& issues,
                                         const std::vector<std::string>& versions,
                                         const corpus::ImpactFactorTable& factors = {},
                                         const HistoryOptions& options = {});

/// CSV columns version,ordinal,delta_cpv,cumulative_cpv.
void write_series_csv(std::ostream& out, const std::vector<ReleaseRecord>& history);

}  // namespace rulcast::cpv
