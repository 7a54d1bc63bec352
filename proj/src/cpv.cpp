#include "rulcast/cpv.hpp"

#include <algorithm>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"

namespace rulcast::cpv {

QuarterPoints contribution(const corpus::IssueRecord& issue, const corpus::ImpactFactorTable& factors) {
  if (!issue.story_points)
    throw Error(Errc::sizing_missing, "issue " + issue.id + " has no story points assigned");
  std::int64_t units = static_cast<std::int64_t>(*issue.story_points) * factors.factor(issue.impact).units();
  return QuarterPoints::from_units(issue.sign == corpus::Sign::improving ? -units : units);
}

QuarterPoints release_delta(const std::vector<corpus::IssueRecord>& issues, const corpus::ImpactFactorTable& factors) {
  QuarterPoints total;
  for (const auto& issue : issues) total += contribution(issue, factors);
  return total;
}

std::vector<QuarterPoints> cumulative_series(QuarterPoints base, const std::vector<QuarterPoints>& deltas) {
  std::vector<QuarterPoints> out;
  out.reserve(deltas.size());
  QuarterPoints running = base;
  for (QuarterPoints d : deltas) {
    running += d;
    out.push_back(running);
  }
  return out;
}

std::vector<ReleaseRecord> build_history(const std::vector<corpus::IssueRecord>& issues,
                                         const std::vector<std::string>& versions,
                                         const corpus::ImpactFactorTable& factors, const HistoryOptions& options) {
  std::vector<Version> order;
  auto add = [&](const std::string& v) {
    Version parsed(v);
    if (std::find(order.begin(), order.end(), parsed) == order.end()) order.push_back(std::move(parsed));
  };
  for (const auto& v : versions) add(v);
  for (const auto& issue : issues)
    if (issue.resolved_release) add(*issue.resolved_release);
  std::sort(order.begin(), order.end());

  std::vector<ReleaseRecord> history;
  history.reserve(order.size());
  QuarterPoints running = options.base;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ReleaseRecord rec;
    rec.version = order[i].str();
    rec.ordinal = i;
    std::vector<corpus::IssueRecord> landed;
    for (const auto& issue : issues) {
      if (issue.resolved_release && Version(*issue.resolved_release) == order[i]) {
        landed.push_back(issue);
        rec.issue_ids.push_back(issue.id);
      }
    }
    rec.delta = release_delta(landed, factors);
    for (const auto& [version, base] : options.resets)
      if (Version(version) == order[i]) running = base;
    running += rec.delta;
    rec.cumulative = running;
    history.push_back(std::move(rec));
  }
  return history;
}

void write_series_csv(std::ostream& out, const std::vector<ReleaseRecord>& history) {
  out << "version,ordinal,delta_cpv,cumulative_cpv\n";
  for (const auto& r : history)
    write_csv_row(out, {r.version, std::to_string(r.ordinal), r.delta.str(), r.cumulative.str()});
}

}  // namespace rulcast::cpv
