#pragma once

// File renderings of pipeline results. All writers are deterministic.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rulcast/horizon.hpp"
#include "rulcast/nlp.hpp"
#include "rulcast/pipeline.hpp"
#include "rulcast/prognosis.hpp"

namespace rulcast::report {

inline constexpr const char* kGenerator = "rulcast 1.0.0";

/// combo,version,cumulative_cpv,cluster,predicted_rt_ms,extrapolated,crossed
void write_rul_csv(std::ostream& out, const std::vector<horizon::RulReport>& ranked);
nlohmann::ordered_json rul_json(const std::vector<horizon::RulReport>& ranked);
/// Historical RT solid, each combo dashed, threshold as a horizontal line.
std::string rul_svg(const Snapshot& snapshot, const std::vector<horizon::RulReport>& ranked);

/// version,ordinal,delta_cpv,cumulative_cpv,rt_ms,cluster
void write_releases_csv(std::ostream& out, const Snapshot& snapshot);
/// version,cluster (modelled releases only)
void write_clusters_csv(std::ostream& out, const Snapshot& snapshot);
/// k,wcss
void write_wcss_csv(std::ostream& out, const analogs::ElbowCurve& elbow);
/// x,residual (cumulative CPV, ms)
void write_residuals_csv(std::ostream& out, const prognosis::RegressionModel& model);

nlohmann::ordered_json regression_json(const prognosis::RegressionModel& model);
/// Cluster centroids (raw units), elbow, and per-cluster regression statistics.
nlohmann::ordered_json model_json(const Snapshot& snapshot);
nlohmann::ordered_json releases_json(const Snapshot& snapshot);
nlohmann::ordered_json issue_json(const corpus::IssueRecord& issue, bool predicted);
nlohmann::ordered_json confusion_json(const nlp::ConfusionMatrix& matrix);

/// Numbers in CSV cells: up to 6 fraction digits, trailing zeros trimmed.
std::string num(double value);

}  // namespace rulcast::report
