#pragma once

// Future-release planning: combo CPV series, RT projection through the
// per-cluster models, threshold crossing and combo ranking.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rulcast/analogs.hpp"
#include "rulcast/corpus.hpp"
#include "rulcast/prognosis.hpp"
#include "rulcast/quarter_points.hpp"

namespace rulcast::horizon {

inline constexpr double kDefaultThresholdMs = 9000.0;

struct PlannedRelease {
  std::string version;
  std::vector<std::string> issue_ids;
  std::optional<QuarterPoints> delta_override;
};

struct ReleasePlan {
  std::string label;
  std::vector<PlannedRelease> releases;
};

struct PlanSet {
  std::optional<double> threshold_ms;
  std::vector<ReleasePlan> combos;
};

/// {"threshold_ms"?: number, "combos": [{"label", "releases": [{"version",
/// "issues": [ids]} | {"version", "delta_cpv": number|string}]}]}
/// Throws Errc::parse naming the offending path.
PlanSet parse_plans(const nlohmann::json& doc);
PlanSet load_plans_file(const std::string& path);
nlohmann::ordered_json plans_to_json(const PlanSet& plans);

struct PlannedCpv {
  std::string version;
  QuarterPoints delta;
  QuarterPoints cumulative;
};

/// Validates the plan against the issue store and accumulates its deltas
/// from `base`. Versions must increase and follow `last_historical`; each
/// referenced issue must exist, be unresolved, sized, and used once.
std::vector<PlannedCpv> build_plan(const ReleasePlan& plan, const std::vector<corpus::IssueRecord>& issues,
                                   QuarterPoints base, const std::optional<std::string>& last_historical = std::nullopt,
                                   const corpus::ImpactFactorTable& factors = {});

enum class FeatureSet { cumulative, cumulative_delta };

/// Raw (unstandardized) clustering features of one release.
analogs::FeatureVector release_features(FeatureSet set, QuarterPoints cumulative, QuarterPoints delta);

struct ProjectionModel {
  FeatureSet features = FeatureSet::cumulative;
  analogs::Standardizer standardizer;
  analogs::ClusterModel clusters;
  // Indexed by cluster; empty where the cluster could not be fitted.
  std::vector<std::optional<prognosis::RegressionModel>> regressions;
  std::vector<std::string> unfittable_reasons;
};

struct ProjectedRelease {
  std::string version;
  QuarterPoints delta;
  QuarterPoints cumulative;
  std::size_t cluster = 0;
  double predicted_rt_ms = 0;
  bool extrapolated = false;
  bool crossed = false;
};

/// Assigns each release to its nearest cluster and evaluates that cluster's
/// line. Throws Errc::unfittable_cluster naming the release when the
/// cluster has no model.
std::vector<ProjectedRelease> project_rt(const std::vector<PlannedCpv>& series, const ProjectionModel& model);

struct RulEstimate {
  std::optional<std::size_t> first_crossing;  // 0-based index into the trajectory
  std::size_t rul_releases = 0;
  bool censored = false;
};

/// First release whose predicted RT is strictly above the threshold.
RulEstimate estimate_rul(const std::vector<double>& trajectory_ms, double threshold_ms);

struct RulReport {
  std::string label;
  std::vector<ProjectedRelease> releases;
  double threshold_ms = kDefaultThresholdMs;
  std::optional<std::size_t> first_crossing;
  std::size_t rul_releases = 0;
  bool censored = false;

  double final_rt_ms() const;
};

RulReport make_report(std::string label, std::vector<ProjectedRelease> releases, double threshold_ms);

/// Censored first, then descending RUL, then lower final RT, then label.
/// Throws Errc::comparison on mixed thresholds.
std::vector<RulReport> rank_combos(std::vector<RulReport> reports);

nlohmann::ordered_json report_to_json(const RulReport& report);

}  // namespace rulcast::horizon
