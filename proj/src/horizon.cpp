#include "rulcast/horizon.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rulcast/common.hpp"
#include "rulcast/cpv.hpp"
#include "rulcast/error.hpp"
#include "rulcast/json_util.hpp"

namespace rulcast::horizon {

namespace {

Error parse_error(const std::string& path, const std::string& what) {
  return Error(Errc::parse, "plan " + path + ": " + what);
}

}  // namespace

PlanSet parse_plans(const nlohmann::json& doc) {
  if (!doc.is_object()) throw parse_error("$", "expected an object");
  PlanSet out;
  if (auto it = doc.find("threshold_ms"); it != doc.end() && !it->is_null()) {
    if (!it->is_number() || !(it->get<double>() > 0)) throw parse_error("$.threshold_ms", "expected a number > 0");
    out.threshold_ms = it->get<double>();
  }
  auto combos = doc.find("combos");
  if (combos == doc.end() || !combos->is_array()) throw parse_error("$.combos", "expected an array");
  for (std::size_t c = 0; c < combos->size(); ++c) {
    const auto& jc = (*combos)[c];
    const std::string cpath = "$.combos[" + std::to_string(c) + "]";
    if (!jc.is_object()) throw parse_error(cpath, "expected an object");
    ReleasePlan plan;
    auto label = jc.find("label");
    if (label == jc.end() || !label->is_string() || label->get<std::string>().empty())
      throw parse_error(cpath + ".label", "expected a non-empty string");
    plan.label = label->get<std::string>();
    auto releases = jc.find("releases");
    if (releases == jc.end() || !releases->is_array() || releases->empty())
      throw parse_error(cpath + ".releases", "expected a non-empty array");
    for (std::size_t r = 0; r < releases->size(); ++r) {
      const auto& jr = (*releases)[r];
      const std::string rpath = cpath + ".releases[" + std::to_string(r) + "]";
      if (!jr.is_object()) throw parse_error(rpath, "expected an object");
      PlannedRelease rel;
      auto version = jr.find("version");
      if (version == jr.end() || !version->is_string()) throw parse_error(rpath + ".version", "expected a string");
      rel.version = version->get<std::string>();
      try {
        Version check(rel.version);
      } catch (const Error& e) {
        throw parse_error(rpath + ".version", e.what());
      }
      auto issues = jr.find("issues");
      auto delta = jr.find("delta_cpv");
      bool has_issues = issues != jr.end() && !issues->is_null();
      bool has_delta = delta != jr.end() && !delta->is_null();
      if (has_issues && has_delta)
        throw parse_error(rpath, "give either issues or delta_cpv, not both");
      if (has_issues) {
        if (!issues->is_array()) throw parse_error(rpath + ".issues", "expected an array of ids");
        for (const auto& id : *issues) {
          if (!id.is_string()) throw parse_error(rpath + ".issues", "issue ids must be strings");
          rel.issue_ids.push_back(id.get<std::string>());
        }
      }
      if (has_delta) {
        try {
          if (delta->is_string())
            rel.delta_override = QuarterPoints::parse(delta->get<std::string>());
          else if (delta->is_number())
            rel.delta_override = QuarterPoints::from_double(delta->get<double>());
          else
            throw Error(Errc::parse, "expected a number or string");
        } catch (const Error& e) {
          throw parse_error(rpath + ".delta_cpv", e.what());
        }
      }
      plan.releases.push_back(std::move(rel));
    }
    out.combos.push_back(std::move(plan));
  }
  return out;
}

PlanSet load_plans_file(const std::string& path) {
  std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, "plan file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_plans(doc);
}

nlohmann::ordered_json plans_to_json(const PlanSet& plans) {
  nlohmann::ordered_json j;
  if (plans.threshold_ms) j["threshold_ms"] = *plans.threshold_ms;
  j["combos"] = nlohmann::ordered_json::array();
  for (const auto& plan : plans.combos) {
    nlohmann::ordered_json jc;
    jc["label"] = plan.label;
    jc["releases"] = nlohmann::ordered_json::array();
    for (const auto& rel : plan.releases) {
      nlohmann::ordered_json jr;
      jr["version"] = rel.version;
      if (rel.delta_override)
        jr["delta_cpv"] = rel.delta_override->str();
      else
        jr["issues"] = rel.issue_ids;
      jc["releases"].push_back(jr);
    }
    j["combos"].push_back(jc);
  }
  return j;
}

std::vector<PlannedCpv> build_plan(const ReleasePlan& plan, const std::vector<corpus::IssueRecord>& issues,
                                   QuarterPoints base, const std::optional<std::string>& last_historical,
                                   const corpus::ImpactFactorTable& factors) {
  auto fail = [&](const std::string& what) { return Error(Errc::plan_validation, plan.label + ": " + what); };
  std::optional<Version> previous;
  if (last_historical) previous = Version(*last_historical);
  std::set<std::string> used;
  std::vector<QuarterPoints> deltas;
  for (const auto& rel : plan.releases) {
    Version v(rel.version);
    if (previous && !(v > *previous))
      throw fail("release " + rel.version + " does not follow " + previous->str());
    previous = v;
    if (rel.delta_override) {
      if (!rel.issue_ids.empty()) throw fail("release " + rel.version + " has both issues and a delta override");
      deltas.push_back(*rel.delta_override);
      continue;
    }
    std::vector<corpus::IssueRecord> content;
    for (const auto& id : rel.issue_ids) {
      if (!used.insert(id).second) throw fail("issue " + id + " is planned more than once");
      auto it = std::find_if(issues.begin(), issues.end(), [&](const corpus::IssueRecord& r) { return r.id == id; });
      if (it == issues.end()) throw fail("unknown issue " + id);
      if (!it->unresolved()) throw fail("issue " + id + " is already resolved in " + *it->resolved_release);
      content.push_back(*it);
    }
    deltas.push_back(cpv::release_delta(content, factors));
  }
  auto cumulative = cpv::cumulative_series(base, deltas);
  std::vector<PlannedCpv> out;
  out.reserve(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) out.push_back({plan.releases[i].version, deltas[i], cumulative[i]});
  return out;
}

analogs::FeatureVector release_features(FeatureSet set, QuarterPoints cumulative, QuarterPoints delta) {
  if (set == FeatureSet::cumulative) return {cumulative.value()};
  return {cumulative.value(), delta.value()};
}

std::vector<ProjectedRelease> project_rt(const std::vector<PlannedCpv>& series, const ProjectionModel& model) {
  std::vector<ProjectedRelease> out;
  out.reserve(series.size());
  for (const auto& rel : series) {
    ProjectedRelease p;
    p.version = rel.version;
    p.delta = rel.delta;
    p.cumulative = rel.cumulative;
    p.cluster = analogs::assign(
        model.clusters, model.standardizer.apply(release_features(model.features, rel.cumulative, rel.delta)));
    if (p.cluster >= model.regressions.size() || !model.regressions[p.cluster]) {
      std::string why = p.cluster < model.unfittable_reasons.size() ? model.unfittable_reasons[p.cluster] : "";
      throw Error(Errc::unfittable_cluster, "release " + rel.version + " falls in cluster " +
                                                analogs::cluster_label(p.cluster) + " which has no regression model" +
                                                (why.empty() ? "" : " (" + why + ")"));
    }
    const auto& line = *model.regressions[p.cluster];
    p.predicted_rt_ms = prognosis::predict_rt(line, rel.cumulative.value());
    p.extrapolated = prognosis::extrapolates(line, rel.cumulative.value());
    out.push_back(std::move(p));
  }
  return out;
}

RulEstimate estimate_rul(const std::vector<double>& trajectory_ms, double threshold_ms) {
  if (trajectory_ms.empty()) throw Error(Errc::parameter, "trajectory is empty");
  if (!(threshold_ms > 0)) throw Error(Errc::parameter, "threshold must be > 0");
  RulEstimate e;
  for (std::size_t i = 0; i < trajectory_ms.size(); ++i) {
    if (trajectory_ms[i] > threshold_ms) {
      e.first_crossing = i;
      e.rul_releases = i;
      return e;
    }
  }
  e.censored = true;
  e.rul_releases = trajectory_ms.size();
  return e;
}

double RulReport::final_rt_ms() const { return releases.empty() ? 0.0 : releases.back().predicted_rt_ms; }

RulReport make_report(std::string label, std::vector<ProjectedRelease> releases, double threshold_ms) {
  std::vector<double> trajectory;
  for (const auto& r : releases) trajectory.push_back(r.predicted_rt_ms);
  RulEstimate e = estimate_rul(trajectory, threshold_ms);
  RulReport report;
  report.label = std::move(label);
  report.threshold_ms = threshold_ms;
  report.first_crossing = e.first_crossing;
  report.rul_releases = e.rul_releases;
  report.censored = e.censored;
  for (auto& r : releases) r.crossed = r.predicted_rt_ms > threshold_ms;
  report.releases = std::move(releases);
  return report;
}

std::vector<RulReport> rank_combos(std::vector<RulReport> reports) {
  for (const auto& r : reports)
    if (r.threshold_ms != reports.front().threshold_ms)
      throw Error(Errc::comparison, "combos " + reports.front().label + " and " + r.label +
                                        " were evaluated against different thresholds");
  std::stable_sort(reports.begin(), reports.end(), [](const RulReport& a, const RulReport& b) {
    if (a.censored != b.censored) return a.censored;
    if (a.rul_releases != b.rul_releases) return a.rul_releases > b.rul_releases;
    if (a.final_rt_ms() != b.final_rt_ms()) return a.final_rt_ms() < b.final_rt_ms();
    return a.label < b.label;
  });
  return reports;
}

nlohmann::ordered_json report_to_json(const RulReport& report) {
  nlohmann::ordered_json j;
  j["combo"] = report.label;
  j["threshold_ms"] = report.threshold_ms;
  j["rul_releases"] = report.rul_releases;
  j["censored"] = report.censored;
  if (report.first_crossing) {
    j["first_crossing"] = *report.first_crossing;
    j["first_crossing_version"] = report.releases[*report.first_crossing].version;
  } else {
    j["first_crossing"] = nullptr;
    j["first_crossing_version"] = nullptr;
  }
  j["releases"] = nlohmann::ordered_json::array();
  for (const auto& r : report.releases) {
    j["releases"].push_back({{"version", r.version},
                             {"delta_cpv", r.delta.str()},
                             {"cumulative_cpv", r.cumulative.str()},
                             {"cluster", analogs::cluster_label(r.cluster)},
                             {"predicted_rt_ms", finite_or_null(r.predicted_rt_ms)},
                             {"extrapolated", r.extrapolated},
                             {"crossed", r.crossed}});
  }
  return j;
}

}  // namespace rulcast::horizon
