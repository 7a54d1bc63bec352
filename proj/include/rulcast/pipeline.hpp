#pragma once

// End-to-end model building shared by the CLI and the service: load inputs,
// size and categorize issues, build the CPV history, aggregate response
// time, cluster, and fit the per-cluster lines.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rulcast/analogs.hpp"
#include "rulcast/config.hpp"
#include "rulcast/corpus.hpp"
#include "rulcast/cpv.hpp"
#include "rulcast/horizon.hpp"
#include "rulcast/nlp.hpp"

namespace rulcast {

struct HistoricalRelease {
  cpv::ReleaseRecord record;
  std::optional<double> rt_ms;     // absent when the release was not measured
  std::optional<std::size_t> cluster;
};

struct Snapshot {
  std::uint64_t version = 0;
  RunConfig config;

  std::vector<corpus::IssueRecord> issues;
  corpus::QualityReport quality;
  std::vector<std::string> predicted_ids;  // issues whose story points came from the sizer
  nlp::StopWords stop_words;
  corpus::CategoryMatrix matrix = corpus::CategoryMatrix::defaults();
  std::optional<nlp::SizingModel> sizer;

  std::vector<HistoricalRelease> history;
  std::vector<std::size_t> measured;  // indices into history used for modelling
  analogs::ElbowCurve elbow;
  horizon::ProjectionModel projection;

  std::optional<std::string> last_version() const;
  QuarterPoints last_cumulative() const;
  /// Cumulative CPV and RT of the modelled releases, in history order.
  std::vector<prognosis::Observation> observations(std::optional<std::size_t> cluster = std::nullopt) const;
};

enum class BuildDepth { issues, history, clusters, full };

/// Builds as far as `depth`. Unfittable clusters are recorded in the
/// projection model rather than thrown; projection through them fails later.
Snapshot build_snapshot(const RunConfig& config, BuildDepth depth = BuildDepth::full, std::uint64_t version = 1);

/// Trains the sizer from the configured corpus, or loads a saved model.
std::optional<nlp::SizingModel> load_sizer(const RunConfig& config, const nlp::StopWords& stop_words);

/// Fills absent categories and story points in place; returns the ids sized
/// by the model.
std::vector<std::string> enrich_issues(std::vector<corpus::IssueRecord>& issues, const corpus::CategoryMatrix& matrix,
                                       const nlp::SizingModel* sizer, const nlp::StopWords& stop_words);

std::string issue_text(const corpus::IssueRecord& issue);

/// build_plan -> project_rt -> make_report for each combo, then ranked.
std::vector<horizon::RulReport> run_plans(const Snapshot& snapshot, const horizon::PlanSet& plans);

}  // namespace rulcast
