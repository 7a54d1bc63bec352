// rulcast: command-line driver for the release prognostics pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rulcast/common.hpp"
#include "rulcast/config.hpp"
#include "rulcast/error.hpp"
#include "rulcast/pipeline.hpp"
#include "rulcast/prognosis.hpp"
#include "rulcast/report.hpp"
#include "rulcast/service.hpp"

namespace fs = std::filesystem;
using namespace rulcast;
using nlohmann::ordered_json;

namespace {

constexpr int kDomainFailure = 1;
constexpr int kUsageFailure = 2;

// Flags that override config keys, keyed by config key.
struct Overrides {
  std::string config_path;
  std::string out_dir = ".";
  std::map<std::string, std::string> values;
};

void add_override(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key,
                  const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.values[key] = v; }, help);
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "run configuration (key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  add_override(cmd, o, "--issues", "issues", "issues file (.csv or .jsonl)");
  add_override(cmd, o, "--rt", "rt_samples", "response-time samples CSV");
  add_override(cmd, o, "--corpus", "corpus", "sizer training corpus CSV (text,story_points)");
  add_override(cmd, o, "--sizer", "sizer_model", "saved sizer model");
  add_override(cmd, o, "--categories", "category_matrix", "category matrix CSV");
  add_override(cmd, o, "--stop-words", "stop_words", "stop-word list");
  add_override(cmd, o, "--environment", "environment", "RT environment to use");
  add_override(cmd, o, "--base-cpv", "base_cpv", "cumulative CPV before the first release");
  add_override(cmd, o, "--seed", "seed", "random seed");
  add_override(cmd, o, "--alpha", "alpha", "Naive Bayes smoothing constant");
  add_override(cmd, o, "--k-max", "k_max", "largest k on the elbow curve");
  add_override(cmd, o, "--restarts", "restarts", "k-means restarts");
  add_override(cmd, o, "--features", "features", "cumulative or cumulative+delta");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  for (const auto& [key, value] : o.values) apply_setting(c, key, value);
  c.validate();
  return c;
}

void require_file(const std::string& path, std::string_view what) {
  if (path.empty()) throw Error(Errc::parameter, std::string(what) + " is not configured");
  if (!fs::is_regular_file(path)) throw Error(Errc::io, std::string(what) + " '" + path + "' does not exist");
}

class Emitter {
 public:
  explicit Emitter(std::string dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(Errc::io, "write failed for '" + path.string() + "'");
    std::cout << path.string() << "\n";
  }

  void json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

 private:
  std::string dir_;
};

template <class F>
std::string render(F&& f) {
  std::ostringstream out;
  f(out);
  return out.str();
}

int cmd_ingest(const Overrides& o, bool lenient, const std::string& quality_format) {
  RunConfig c = resolve_config(o);
  require_file(c.issues, "issues file");
  corpus::LoadOptions opts;
  opts.strict = !lenient;
  auto loaded = corpus::load_issues_file(c.issues, opts);
  nlp::StopWords stop_words;
  if (!c.stop_words.empty()) {
    std::ifstream in(c.stop_words);
    stop_words = nlp::StopWords::load(in);
  }
  auto matrix = corpus::CategoryMatrix::defaults();
  if (!c.category_matrix.empty()) {
    require_file(c.category_matrix, "category matrix");
    std::ifstream in(c.category_matrix);
    matrix = corpus::CategoryMatrix::load(in);
  }
  enrich_issues(loaded.records, matrix, nullptr, stop_words);

  Emitter emit(o.out_dir);
  emit.write("issues.csv", render([&](std::ostream& out) {
               corpus::write_issues(out, loaded.records, corpus::IssueFormat::csv);
             }));
  if (quality_format == "json")
    emit.write("quality.json", corpus::render_json(loaded.quality));
  else
    emit.write("quality.txt", corpus::render_text(loaded.quality));
  if (!c.rt_samples.empty()) {
    require_file(c.rt_samples, "RT samples file");
    Snapshot s = build_snapshot(c, BuildDepth::history);
    emit.write("releases.csv", render([&](std::ostream& out) { report::write_releases_csv(out, s); }));
  }
  return 0;
}

int cmd_train_sizer(const Overrides& o) {
  RunConfig c = resolve_config(o);
  require_file(c.corpus, "training corpus");
  c.sizer_model.clear();
  nlp::StopWords stop_words;
  if (!c.stop_words.empty()) {
    std::ifstream in(c.stop_words);
    stop_words = nlp::StopWords::load(in);
  }
  auto model = load_sizer(c, stop_words);
  Emitter emit(o.out_dir);
  emit.write("sizer.model", render([&](std::ostream& out) { model->save(out); }));
  return 0;
}

int cmd_size(const Overrides& o) {
  RunConfig c = resolve_config(o);
  require_file(c.issues, "issues file");
  if (c.corpus.empty() && c.sizer_model.empty())
    throw Error(Errc::parameter, "sizing needs --corpus or --sizer");
  Snapshot s = build_snapshot(c, BuildDepth::issues);
  Emitter emit(o.out_dir);
  emit.write("issues.sized.csv", render([&](std::ostream& out) {
               corpus::write_issues(out, s.issues, corpus::IssueFormat::csv);
             }));
  emit.write("sizing.csv", render([&](std::ostream& out) {
               out << "id,story_points,p_1,p_2,p_3,p_5,p_8\n";
               for (const auto& id : s.predicted_ids) {
                 auto it = std::find_if(s.issues.begin(), s.issues.end(),
                                        [&](const corpus::IssueRecord& r) { return r.id == id; });
                 auto post = nlp::posterior(*s.sizer, nlp::normalize(issue_text(*it), s.stop_words));
                 CsvRow row{id, std::to_string(*it->story_points)};
                 for (int cls : corpus::kStoryPointClasses) {
                   std::string cell;
                   for (const auto& [k, p] : post)
                     if (k == cls) cell = report::num(p);
                   row.push_back(cell);
                 }
                 write_csv_row(out, row);
               }
             }));
  return 0;
}

int cmd_cpv(const Overrides& o) {
  RunConfig c = resolve_config(o);
  require_file(c.issues, "issues file");
  Snapshot s = build_snapshot(c, BuildDepth::history);
  std::vector<cpv::ReleaseRecord> records;
  for (const auto& h : s.history) records.push_back(h.record);
  Emitter emit(o.out_dir);
  emit.write("cpv.csv", render([&](std::ostream& out) { cpv::write_series_csv(out, records); }));
  return 0;
}

RunConfig modelling_config(const Overrides& o, std::optional<std::size_t> k) {
  RunConfig c = resolve_config(o);
  if (k) c.k = *k;
  require_file(c.issues, "issues file");
  require_file(c.rt_samples, "RT samples file");
  return c;
}

int cmd_cluster(const Overrides& o, std::optional<std::size_t> k) {
  Snapshot s = build_snapshot(modelling_config(o, k), BuildDepth::clusters);
  Emitter emit(o.out_dir);
  emit.write("clusters.csv", render([&](std::ostream& out) { report::write_clusters_csv(out, s); }));
  emit.write("wcss.csv", render([&](std::ostream& out) { report::write_wcss_csv(out, s.elbow); }));
  return 0;
}

int cmd_fit(const Overrides& o, std::optional<std::size_t> k, const std::string& cluster) {
  Snapshot s = build_snapshot(modelling_config(o, k), BuildDepth::full);
  const auto& proj = s.projection;
  std::vector<std::size_t> wanted;
  if (!cluster.empty()) {
    std::size_t c = analogs::parse_cluster_label(cluster);
    if (c >= proj.clusters.k)
      throw Error(Errc::parameter, "cluster " + cluster + " does not exist (k = " + std::to_string(proj.clusters.k) + ")");
    if (!proj.regressions[c]) throw Error(Errc::insufficient_data, proj.unfittable_reasons[c]);
    wanted.push_back(c);
  } else {
    for (std::size_t c = 0; c < proj.clusters.k; ++c) wanted.push_back(c);
  }
  Emitter emit(o.out_dir);
  ordered_json j;
  j["clusters"] = ordered_json::array();
  for (std::size_t c : wanted) {
    if (proj.regressions[c]) {
      j["clusters"].push_back(report::regression_json(*proj.regressions[c]));
    } else {
      j["clusters"].push_back({{"cluster", analogs::cluster_label(c)}, {"unfittable", proj.unfittable_reasons[c]}});
      continue;
    }
  }
  emit.json("fit.json", j);
  for (std::size_t c : wanted)
    if (proj.regressions[c])
      emit.write("residuals_" + analogs::cluster_label(c) + ".csv",
                 render([&](std::ostream& out) { report::write_residuals_csv(out, *proj.regressions[c]); }));
  return 0;
}

int cmd_evaluate(const Overrides& o, std::optional<std::size_t> k) {
  RunConfig c = modelling_config(o, k);
  Snapshot s = build_snapshot(c, BuildDepth::full);
  ordered_json j;

  if (!c.corpus.empty()) {
    std::ifstream in(c.corpus);
    auto docs = nlp::tokenize_corpus(nlp::load_training_corpus(in), s.stop_words);
    auto split = prognosis::train_test_split(docs.size(), {c.train_fraction, c.seed, c.fold_count});
    std::vector<nlp::LabeledDoc> train, test;
    for (std::size_t i : split.train) train.push_back(docs[i]);
    for (std::size_t i : split.test) test.push_back(docs[i]);
    auto model = nlp::train_sizer(train, c.alpha);
    j["sizer"] = report::confusion_json(nlp::evaluate(model, test));
  } else {
    j["sizer"] = nullptr;
  }

  j["regression"] = ordered_json::array();
  for (std::size_t cl = 0; cl < s.projection.clusters.k; ++cl) {
    ordered_json jc;
    jc["cluster"] = analogs::cluster_label(cl);
    auto obs = s.observations(cl);
    jc["n"] = obs.size();
    try {
      auto cv = prognosis::kfold_cv(obs, c.fold_count, c.seed);
      jc["cv_scores"] = cv.scores;
      jc["cv_mean"] = cv.mean;
    } catch (const Error& e) {
      jc["cv_error"] = e.what();
    }
    try {
      auto h = prognosis::holdout(obs, {c.train_fraction, c.seed, c.fold_count});
      jc["holdout_r_squared"] = h.r_squared ? ordered_json(*h.r_squared) : ordered_json(nullptr);
      jc["holdout_test_size"] = h.test.size();
    } catch (const Error& e) {
      jc["holdout_error"] = e.what();
    }
    j["regression"].push_back(jc);
  }
  Emitter emit(o.out_dir);
  emit.json("evaluation.json", j);
  return 0;
}

horizon::PlanSet load_plans(const RunConfig& c, const std::string& flag) {
  std::string path = flag.empty() ? c.plans : flag;
  require_file(path, "plans file");
  return horizon::load_plans_file(path);
}

int cmd_plan(const Overrides& o, const std::string& plans_flag) {
  RunConfig c = resolve_config(o);
  require_file(c.issues, "issues file");
  auto plans = load_plans(c, plans_flag);
  Snapshot s = build_snapshot(c, BuildDepth::history);
  std::ostringstream out;
  out << "combo,version,delta_cpv,cumulative_cpv\n";
  for (const auto& plan : plans.combos)
    for (const auto& r : horizon::build_plan(plan, s.issues, s.last_cumulative(), s.last_version()))
      write_csv_row(out, {plan.label, r.version, r.delta.str(), r.cumulative.str()});
  Emitter emit(o.out_dir);
  emit.write("plan_cpv.csv", out.str());
  return 0;
}

int cmd_rul(const Overrides& o, std::optional<std::size_t> k, const std::string& plans_flag,
            std::optional<double> threshold) {
  RunConfig c = modelling_config(o, k);
  if (threshold) {
    c.threshold_ms = *threshold;
    c.validate();
  }
  auto plans = load_plans(c, plans_flag);
  if (threshold) plans.threshold_ms = *threshold;
  Snapshot s = build_snapshot(c, BuildDepth::full);
  auto ranked = run_plans(s, plans);
  Emitter emit(o.out_dir);
  emit.write("rul.csv", render([&](std::ostream& out) { report::write_rul_csv(out, ranked); }));
  emit.json("rul.json", report::rul_json(ranked));
  emit.write("rul.svg", report::rul_svg(s, ranked));
  return 0;
}

int cmd_serve(const Overrides& o, std::optional<std::string> host, std::optional<int> port) {
  RunConfig c = modelling_config(o, std::nullopt);
  if (host) c.host = *host;
  if (port) c.port = *port;
  c.validate();
  service::PlanningService svc(c);
  service::serve(svc, c.host, c.port);
  return 0;
}

int exit_code_for(Errc code) { return code == Errc::parameter || code == Errc::io ? kUsageFailure : kDomainFailure; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rulcast: remaining-useful-life prognosis over release cycles"};
  app.require_subcommand(1);

  Overrides o;
  bool lenient = false;
  std::string quality_format = "text";
  std::optional<std::size_t> k;
  std::string cluster;
  std::string plans_flag;
  std::optional<double> threshold;
  std::optional<std::string> host;
  std::optional<int> port;

  auto* ingest = app.add_subcommand("ingest", "load issues (and RT samples), write the normalized store and quality report");
  add_common(ingest, o);
  ingest->add_flag("--lenient", lenient, "report malformed rows instead of failing");
  ingest->add_option("--quality-format", quality_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* train = app.add_subcommand("train-sizer", "train the story-point classifier");
  add_common(train, o);

  auto* size = app.add_subcommand("size", "classify unsized issues");
  add_common(size, o);

  auto* cpv_cmd = app.add_subcommand("cpv", "export the CPV series");
  add_common(cpv_cmd, o);

  auto* cluster_cmd = app.add_subcommand("cluster", "cluster releases and export the elbow curve");
  add_common(cluster_cmd, o);

  auto* fit = app.add_subcommand("fit", "fit per-cluster regressions");
  add_common(fit, o);
  fit->add_option("--cluster", cluster, "only this cluster (A, B, ...)");

  auto* evaluate = app.add_subcommand("evaluate", "confusion matrix and cross-validation scores");
  add_common(evaluate, o);

  auto* plan = app.add_subcommand("plan", "validate plans and export their CPV series");
  add_common(plan, o);
  plan->add_option("--plans", plans_flag, "plans JSON file");

  auto* rul = app.add_subcommand("rul", "project combos and estimate RUL");
  add_common(rul, o);
  rul->add_option("--plans", plans_flag, "plans JSON file");
  rul->add_option("--threshold", threshold, "RT threshold in ms");

  auto* serve = app.add_subcommand("serve", "start the planning service");
  add_common(serve, o);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port");

  for (auto* cmd : {cluster_cmd, fit, evaluate, rul}) cmd->add_option("--k", k, "number of clusters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "rulcast: " << e.what() << "\n";
    auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kUsageFailure;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == ingest) return cmd_ingest(o, lenient, quality_format);
    if (active == train) return cmd_train_sizer(o);
    if (active == size) return cmd_size(o);
    if (active == cpv_cmd) return cmd_cpv(o);
    if (active == cluster_cmd) return cmd_cluster(o, k);
    if (active == fit) return cmd_fit(o, k, cluster);
    if (active == evaluate) return cmd_evaluate(o, k);
    if (active == plan) return cmd_plan(o, plans_flag);
    if (active == rul) return cmd_rul(o, k, plans_flag, threshold);
    if (active == serve) return cmd_serve(o, host, port);
  } catch (const Error& e) {
    std::cerr << "rulcast " << active->get_name() << ": error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    if (exit_code_for(e.code()) == kUsageFailure) std::cerr << active->help();
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "rulcast " << active->get_name() << ": error: " << e.what() << "\n";
    return kDomainFailure;
  }
  return kUsageFailure;
}
