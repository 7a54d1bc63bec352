#include "rulcast/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"
#include "rulcast/prognosis.hpp"

namespace rulcast {

namespace {

std::ifstream open_input(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + std::string(what) + " '" + path + "'");
  return in;
}

bool has_samples(const std::vector<corpus::RtSampleSet>& sets, const std::string& release,
                 const std::optional<std::string>& environment) {
  const Version wanted(release);
  return std::any_of(sets.begin(), sets.end(), [&](const corpus::RtSampleSet& s) {
    return !s.samples_ms.empty() && Version(s.release) == wanted && (!environment || s.environment == *environment);
  });
}

}  // namespace

std::optional<std::string> Snapshot::last_version() const {
  if (history.empty()) return std::nullopt;
  return history.back().record.version;
}

QuarterPoints Snapshot::last_cumulative() const {
  return history.empty() ? config.base_cpv : history.back().record.cumulative;
}

std::vector<prognosis::Observation> Snapshot::observations(std::optional<std::size_t> cluster) const {
  std::vector<prognosis::Observation> out;
  for (std::size_t i : measured) {
    const auto& h = history[i];
    if (cluster && h.cluster != cluster) continue;
    out.push_back({h.record.cumulative.value(), *h.rt_ms});
  }
  return out;
}

std::string issue_text(const corpus::IssueRecord& issue) {
  if (issue.title.empty()) return issue.description;
  if (issue.description.empty()) return issue.title;
  return issue.title + " " + issue.description;
}

std::optional<nlp::SizingModel> load_sizer(const RunConfig& config, const nlp::StopWords& stop_words) {
  if (!config.sizer_model.empty()) {
    auto in = open_input(config.sizer_model, "sizer model");
    return nlp::SizingModel::load(in);
  }
  if (!config.corpus.empty()) {
    auto in = open_input(config.corpus, "training corpus");
    auto docs = nlp::tokenize_corpus(nlp::load_training_corpus(in), stop_words);
    return nlp::train_sizer(docs, config.alpha);
  }
  return std::nullopt;
}

std::vector<std::string> enrich_issues(std::vector<corpus::IssueRecord>& issues, const corpus::CategoryMatrix& matrix,
                                       const nlp::SizingModel* sizer, const nlp::StopWords& stop_words) {
  std::vector<std::string> sized;
  for (auto& issue : issues) {
    if (!issue.category) {
      auto label = corpus::categorize(issue, matrix);
      issue.category = label.category;
      issue.subcategory = label.subcategory;
    }
    if (!issue.story_points && sizer) {
      issue.story_points = nlp::classify_sp(*sizer, nlp::normalize(issue_text(issue), stop_words));
      sized.push_back(issue.id);
    }
  }
  return sized;
}

Snapshot build_snapshot(const RunConfig& config, BuildDepth depth, std::uint64_t version) {
  config.validate();
  Snapshot s;
  s.version = version;
  s.config = config;

  if (!config.stop_words.empty()) {
    auto in = open_input(config.stop_words, "stop-word list");
    s.stop_words = nlp::StopWords::load(in);
  }
  if (!config.category_matrix.empty()) {
    auto in = open_input(config.category_matrix, "category matrix");
    s.matrix = corpus::CategoryMatrix::load(in);
  }
  s.sizer = load_sizer(config, s.stop_words);

  if (config.issues.empty()) throw Error(Errc::parameter, "no issues file configured");
  auto loaded = corpus::load_issues_file(config.issues);
  s.issues = std::move(loaded.records);
  s.quality = std::move(loaded.quality);
  s.predicted_ids = enrich_issues(s.issues, s.matrix, s.sizer ? &*s.sizer : nullptr, s.stop_words);
  if (depth == BuildDepth::issues) return s;

  std::vector<corpus::RtSampleSet> samples;
  std::vector<std::string> versions;
  if (!config.rt_samples.empty()) {
    samples = corpus::load_rt_samples_file(config.rt_samples);
    for (const auto& set : samples)
      if (!config.environment || set.environment == *config.environment) versions.push_back(set.release);
  }
  cpv::HistoryOptions options;
  options.base = config.base_cpv;
  for (auto& record : cpv::build_history(s.issues, versions, {}, options)) {
    HistoricalRelease h;
    h.record = std::move(record);
    if (has_samples(samples, h.record.version, config.environment)) {
      std::optional<std::string_view> env;
      if (config.environment) env = *config.environment;
      h.rt_ms = corpus::aggregate_rt(samples, h.record.version, env);
      s.measured.push_back(s.history.size());
    }
    s.history.push_back(std::move(h));
  }
  if (depth == BuildDepth::history) return s;

  if (s.measured.empty()) throw Error(Errc::missing_data, "no release has response-time measurements");
  auto& proj = s.projection;
  proj.features = config.features;
  std::vector<analogs::FeatureVector> raw;
  for (std::size_t i : s.measured)
    raw.push_back(horizon::release_features(config.features, s.history[i].record.cumulative,
                                            s.history[i].record.delta));
  proj.standardizer = analogs::Standardizer::fit(raw);
  auto points = proj.standardizer.apply(raw);

  const std::size_t n = points.size();
  s.elbow = analogs::wcss_curve(points, std::min(config.k_max, n), config.seed, config.restarts, config.max_iter,
                                config.tol);
  const std::size_t k = config.k.value_or(s.elbow.suggested_k);
  if (k < 1 || k > n)
    throw Error(Errc::parameter, "k = " + std::to_string(k) + " is outside 1.." + std::to_string(n) +
                                     " (the number of measured releases)");
  proj.clusters = analogs::fit_best(points, {k, config.seed, config.max_iter, config.tol}, config.restarts);
  for (std::size_t j = 0; j < n; ++j) s.history[s.measured[j]].cluster = proj.clusters.assignments[j];
  if (depth == BuildDepth::clusters) return s;

  proj.regressions.assign(k, std::nullopt);
  proj.unfittable_reasons.assign(k, "");
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> xs, ys;
    for (const auto& o : s.observations(c)) {
      xs.push_back(o.cpv);
      ys.push_back(o.rt_ms);
    }
    try {
      auto model = prognosis::fit_line(xs, ys);
      model.cluster = c;
      proj.regressions[c] = std::move(model);
    } catch (const Error& e) {
      if (e.code() != Errc::insufficient_data && e.code() != Errc::degenerate) throw;
      proj.unfittable_reasons[c] = e.what();
    }
  }
  return s;
}

std::vector<horizon::RulReport> run_plans(const Snapshot& snapshot, const horizon::PlanSet& plans) {
  if (plans.combos.empty()) throw Error(Errc::plan_validation, "plan set has no combos");
  const double threshold = plans.threshold_ms.value_or(snapshot.config.threshold_ms);
  std::vector<horizon::RulReport> reports;
  for (const auto& plan : plans.combos) {
    for (const auto& other : reports)
      if (other.label == plan.label) throw Error(Errc::plan_validation, "duplicate combo label " + plan.label);
    auto series = horizon::build_plan(plan, snapshot.issues, snapshot.last_cumulative(), snapshot.last_version());
    auto projected = horizon::project_rt(series, snapshot.projection);
    reports.push_back(horizon::make_report(plan.label, std::move(projected), threshold));
  }
  return horizon::rank_combos(std::move(reports));
}

}  // namespace rulcast
