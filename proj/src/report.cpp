#include "rulcast/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rulcast/common.hpp"
#include "rulcast/json_util.hpp"

namespace rulcast::report {

using nlohmann::ordered_json;

std::string num(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  return format_trimmed(value, 6);
}

void write_rul_csv(std::ostream& out, const std::vector<horizon::RulReport>& ranked) {
  out << "combo,version,cumulative_cpv,cluster,predicted_rt_ms,extrapolated,crossed\n";
  for (const auto& r : ranked)
    for (const auto& p : r.releases)
      write_csv_row(out, {r.label, p.version, p.cumulative.str(), analogs::cluster_label(p.cluster),
                          num(p.predicted_rt_ms), p.extrapolated ? "true" : "false", p.crossed ? "true" : "false"});
}

ordered_json rul_json(const std::vector<horizon::RulReport>& ranked) {
  ordered_json j;
  j["threshold_ms"] = ranked.empty() ? horizon::kDefaultThresholdMs : ranked.front().threshold_ms;
  j["ranking"] = ordered_json::array();
  for (const auto& r : ranked) j["ranking"].push_back(r.label);
  j["combos"] = ordered_json::array();
  for (const auto& r : ranked) j["combos"].push_back(horizon::report_to_json(r));
  return j;
}

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string rul_svg(const Snapshot& snapshot, const std::vector<horizon::RulReport>& ranked) {
  constexpr double W = 860, H = 480, left = 70, right = 170, top = 30, bottom = 60;
  const double threshold = ranked.empty() ? snapshot.config.threshold_ms : ranked.front().threshold_ms;

  std::vector<std::pair<std::size_t, double>> hist;  // x slot, rt
  for (std::size_t i = 0; i < snapshot.history.size(); ++i)
    if (snapshot.history[i].rt_ms) hist.push_back({i, *snapshot.history[i].rt_ms});
  std::size_t horizon_len = 0;
  for (const auto& r : ranked) horizon_len = std::max(horizon_len, r.releases.size());
  const std::size_t slots = std::max<std::size_t>(2, snapshot.history.size() + horizon_len);

  double lo = threshold, hi = threshold;
  for (auto& [x, y] : hist) lo = std::min(lo, y), hi = std::max(hi, y);
  for (const auto& r : ranked)
    for (const auto& p : r.releases)
      if (std::isfinite(p.predicted_rt_ms)) lo = std::min(lo, p.predicted_rt_ms), hi = std::max(hi, p.predicted_rt_ms);
  const double pad = std::max(1.0, (hi - lo) * 0.05);
  lo -= pad;
  hi += pad;

  auto px = [&](double slot) { return left + slot * (W - left - right) / static_cast<double>(slots - 1); };
  auto py = [&](double ms) { return top + (hi - ms) * (H - top - bottom) / (hi - lo); };
  auto pt = [&](double slot, double ms) { return format_fixed(px(slot), 2) + "," + format_fixed(py(ms), 2); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<!-- generator: " << kGenerator << " -->\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">release</text>\n";
  o << "<text x=\"15\" y=\"" << (top + H - bottom) / 2 << "\" transform=\"rotate(-90 15 " << (top + H - bottom) / 2
    << ")\" text-anchor=\"middle\">response time (ms)</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double ms = lo + (hi - lo) * t / 4.0;
    o << "<text x=\"" << left - 5 << "\" y=\"" << format_fixed(py(ms) + 4, 2) << "\" text-anchor=\"end\">"
      << format_fixed(ms, 0) << "</text>\n";
  }
  for (std::size_t i = 0; i < snapshot.history.size(); ++i)
    o << "<text x=\"" << format_fixed(px(static_cast<double>(i)), 2) << "\" y=\"" << H - bottom + 14
      << "\" text-anchor=\"middle\" font-size=\"8\">" << xml_escape(snapshot.history[i].record.version) << "</text>\n";

  o << "<line id=\"threshold\" x1=\"" << left << "\" y1=\"" << format_fixed(py(threshold), 2) << "\" x2=\""
    << W - right << "\" y2=\"" << format_fixed(py(threshold), 2) << "\" stroke=\"gray\" stroke-width=\"1.5\"/>\n";
  o << "<text x=\"" << W - right + 5 << "\" y=\"" << format_fixed(py(threshold) + 4, 2) << "\">threshold "
    << num(threshold) << " ms</text>\n";

  if (!hist.empty()) {
    o << "<polyline id=\"history\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < hist.size(); ++i)
      o << (i ? " " : "") << pt(static_cast<double>(hist[i].first), hist[i].second);
    o << "\"/>\n";
  }
  const double start = hist.empty() ? 0.0 : static_cast<double>(hist.back().first);
  for (std::size_t c = 0; c < ranked.size(); ++c) {
    const auto& r = ranked[c];
    const char* color = kPalette[c % (sizeof kPalette / sizeof kPalette[0])];
    o << "<polyline class=\"combo\" data-combo=\"" << xml_escape(r.label) << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" points=\"";
    bool first = true;
    if (!hist.empty()) {
      o << pt(start, hist.back().second);
      first = false;
    }
    for (std::size_t i = 0; i < r.releases.size(); ++i) {
      if (!std::isfinite(r.releases[i].predicted_rt_ms)) continue;
      o << (first ? "" : " ") << pt(static_cast<double>(snapshot.history.size() + i), r.releases[i].predicted_rt_ms);
      first = false;
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - right + 5 << "\" y=\"" << top + 16 * (c + 1) << "\" fill=\"" << color << "\">"
      << xml_escape(r.label) << ": RUL " << r.rul_releases << (r.censored ? "+" : "") << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_releases_csv(std::ostream& out, const Snapshot& snapshot) {
  out << "version,ordinal,delta_cpv,cumulative_cpv,rt_ms,cluster\n";
  for (const auto& h : snapshot.history)
    write_csv_row(out, {h.record.version, std::to_string(h.record.ordinal), h.record.delta.str(),
                        h.record.cumulative.str(), h.rt_ms ? num(*h.rt_ms) : "",
                        h.cluster ? analogs::cluster_label(*h.cluster) : ""});
}

void write_clusters_csv(std::ostream& out, const Snapshot& snapshot) {
  out << "version,cluster\n";
  for (std::size_t i : snapshot.measured) {
    const auto& h = snapshot.history[i];
    write_csv_row(out, {h.record.version, h.cluster ? analogs::cluster_label(*h.cluster) : ""});
  }
}

void write_wcss_csv(std::ostream& out, const analogs::ElbowCurve& elbow) {
  out << "k,wcss\n";
  for (const auto& p : elbow.curve) write_csv_row(out, {std::to_string(p.k), num(p.wcss)});
}

void write_residuals_csv(std::ostream& out, const prognosis::RegressionModel& model) {
  out << "x,residual\n";
  for (std::size_t i = 0; i < model.xs.size(); ++i) write_csv_row(out, {num(model.xs[i]), num(model.residuals[i])});
}

ordered_json regression_json(const prognosis::RegressionModel& m) {
  ordered_json j;
  j["cluster"] = analogs::cluster_label(m.cluster);
  j["n"] = m.n;
  j["slope"] = finite_or_null(m.slope);
  j["intercept"] = finite_or_null(m.intercept);
  j["pearson_r"] = finite_or_null(m.pearson_r);
  j["r_squared"] = finite_or_null(m.r_squared);
  j["adjusted_r_squared"] = finite_or_null(m.adjusted_r_squared);
  j["slope_se"] = finite_or_null(m.slope_se);
  j["t_statistic"] = finite_or_null(m.t_statistic);
  j["p_value"] = finite_or_null(m.p_value);
  j["cpv_range"] = {m.x_min, m.x_max};
  j["warnings"] = m.warnings;
  return j;
}

ordered_json model_json(const Snapshot& s) {
  const auto& proj = s.projection;
  ordered_json j;
  j["features"] = proj.features == horizon::FeatureSet::cumulative ? "cumulative" : "cumulative+delta";
  j["k"] = proj.clusters.k;
  j["seed"] = s.config.seed;
  j["wcss"] = proj.clusters.wcss;
  j["standardizer"] = {{"mean", proj.standardizer.mean()}, {"stddev", proj.standardizer.stddev()}};
  j["clusters"] = ordered_json::array();
  for (std::size_t c = 0; c < proj.clusters.centroids.size(); ++c) {
    ordered_json jc;
    jc["label"] = analogs::cluster_label(c);
    const auto& z = proj.clusters.centroids[c];
    std::vector<double> raw(z.size());
    for (std::size_t d = 0; d < z.size(); ++d) raw[d] = proj.standardizer.mean()[d] + proj.standardizer.stddev()[d] * z[d];
    jc["centroid"] = raw;
    jc["centroid_standardized"] = z;
    jc["members"] = ordered_json::array();
    for (std::size_t i : s.measured)
      if (s.history[i].cluster == c) jc["members"].push_back(s.history[i].record.version);
    if (c < proj.regressions.size() && proj.regressions[c])
      jc["regression"] = regression_json(*proj.regressions[c]);
    else
      jc["regression"] = nullptr;
    if (c < proj.unfittable_reasons.size() && !proj.unfittable_reasons[c].empty())
      jc["unfittable"] = proj.unfittable_reasons[c];
    j["clusters"].push_back(jc);
  }
  j["elbow"] = ordered_json::array();
  for (const auto& p : s.elbow.curve) j["elbow"].push_back({{"k", p.k}, {"wcss", p.wcss}});
  j["suggested_k"] = s.elbow.suggested_k;
  return j;
}

ordered_json releases_json(const Snapshot& s) {
  ordered_json arr = ordered_json::array();
  for (const auto& h : s.history) {
    ordered_json r;
    r["version"] = h.record.version;
    r["ordinal"] = h.record.ordinal;
    r["delta_cpv"] = h.record.delta.str();
    r["cumulative_cpv"] = h.record.cumulative.str();
    r["rt_ms"] = h.rt_ms ? finite_or_null(*h.rt_ms) : ordered_json(nullptr);
    r["cluster"] = h.cluster ? ordered_json(analogs::cluster_label(*h.cluster)) : ordered_json(nullptr);
    r["issues"] = h.record.issue_ids;
    arr.push_back(r);
  }
  return arr;
}

ordered_json issue_json(const corpus::IssueRecord& i, bool predicted) {
  ordered_json j;
  j["id"] = i.id;
  j["kind"] = corpus::to_string(i.kind);
  j["title"] = i.title;
  j["description"] = i.description;
  j["reported_release"] = i.reported_release;
  j["resolved_release"] = i.resolved_release ? ordered_json(*i.resolved_release) : ordered_json(nullptr);
  j["category"] = i.category ? ordered_json(corpus::to_string(*i.category)) : ordered_json(nullptr);
  j["subcategory"] = i.subcategory;
  j["impact"] = corpus::to_string(i.impact);
  j["story_points"] = i.story_points ? ordered_json(*i.story_points) : ordered_json(nullptr);
  j["story_points_predicted"] = predicted;
  j["sign"] = corpus::sign_symbol(i.sign);
  return j;
}

ordered_json confusion_json(const nlp::ConfusionMatrix& m) {
  ordered_json j;
  j["classes"] = corpus::kStoryPointClasses;
  j["counts"] = ordered_json::array();
  for (const auto& row : m.counts) j["counts"].push_back(row);
  j["total"] = m.total();
  j["correct"] = m.correct();
  j["accuracy"] = m.total() ? ordered_json(m.accuracy()) : ordered_json(nullptr);
  return j;
}

}  // namespace rulcast::report
