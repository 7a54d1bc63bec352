#include "rulcast/service.hpp"

#include <algorithm>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

#include "rulcast/error.hpp"
#include "rulcast/report.hpp"

namespace rulcast::service {

using nlohmann::ordered_json;

namespace {

Response json_response(int status, ordered_json body, const Snapshot* snap) {
  if (snap) body["snapshot"] = snap->version;
  return {status, body.dump()};
}

Response error_response(int status, std::string_view code, const std::string& message, const Snapshot* snap) {
  ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  return json_response(status, std::move(j), snap);
}

Response domain_error(const Error& e, const Snapshot* snap) {
  return error_response(422, errc_name(e.code()), e.what(), snap);
}

// Parses a JSON object body or yields a 400 response.
std::optional<nlohmann::json> parse_body(const std::string& body, Response& failure, const Snapshot* snap) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    failure = error_response(400, "parse", std::string("body: not valid JSON: ") + e.what(), snap);
    return std::nullopt;
  }
  if (!doc.is_object()) {
    failure = error_response(400, "parse", "body: expected a JSON object", snap);
    return std::nullopt;
  }
  return doc;
}

Response get_releases(const Snapshot& s) {
  ordered_json j;
  j["threshold_ms"] = s.config.threshold_ms;
  j["releases"] = report::releases_json(s);
  return json_response(200, std::move(j), &s);
}

Response get_issues(const Snapshot& s, const Query& query) {
  std::string status = "all";
  if (auto it = query.find("status"); it != query.end()) status = it->second;
  if (status != "all" && status != "unresolved" && status != "resolved")
    return error_response(400, "parameter", "status: expected all, unresolved or resolved", &s);
  ordered_json arr = ordered_json::array();
  for (const auto& issue : s.issues) {
    if (status == "unresolved" && !issue.unresolved()) continue;
    if (status == "resolved" && issue.unresolved()) continue;
    bool predicted = std::find(s.predicted_ids.begin(), s.predicted_ids.end(), issue.id) != s.predicted_ids.end();
    arr.push_back(report::issue_json(issue, predicted));
  }
  ordered_json j;
  j["issues"] = std::move(arr);
  return json_response(200, std::move(j), &s);
}

Response post_classify(const Snapshot& s, const std::string& body) {
  Response failure;
  auto doc = parse_body(body, failure, &s);
  if (!doc) return failure;
  auto text = doc->find("text");
  if (text == doc->end() || !text->is_string())
    return error_response(400, "parse", "text: expected a string", &s);
  if (!s.sizer) return error_response(422, errc_name(Errc::training), "no sizing model is configured", &s);
  const std::string raw = text->get<std::string>();
  auto tokens = nlp::normalize(raw, s.stop_words);
  auto post = nlp::posterior(*s.sizer, tokens);
  corpus::IssueRecord probe;
  probe.description = raw;
  auto label = corpus::categorize(probe, s.matrix);

  ordered_json j;
  j["story_points"] = nlp::classify_sp(*s.sizer, tokens);
  j["posterior"] = ordered_json::array();
  for (const auto& [cls, p] : post) j["posterior"].push_back({{"story_points", cls}, {"probability", p}});
  j["category"] = corpus::to_string(label.category);
  j["subcategory"] = label.subcategory;
  j["tokens"] = tokens;
  return json_response(200, std::move(j), &s);
}

Response post_plan(const Snapshot& s, const std::string& body) {
  Response failure;
  auto doc = parse_body(body, failure, &s);
  if (!doc) return failure;
  horizon::PlanSet plans;
  try {
    plans = horizon::parse_plans(*doc);
  } catch (const Error& e) {
    return error_response(400, errc_name(e.code()), e.what(), &s);
  }
  try {
    return json_response(200, report::rul_json(run_plans(s, plans)), &s);
  } catch (const Error& e) {
    return domain_error(e, &s);
  }
}

Response get_model(const Snapshot& s) { return json_response(200, report::model_json(s), &s); }

}  // namespace

PlanningService::PlanningService(SnapshotBuilder builder) : builder_(std::move(builder)) { reload(); }

PlanningService::PlanningService(const RunConfig& config)
    : PlanningService([config](std::uint64_t version) { return build_snapshot(config, BuildDepth::full, version); }) {}

std::shared_ptr<const Snapshot> PlanningService::snapshot() const {
  std::lock_guard lock(current_mutex_);
  return current_;
}

std::shared_ptr<const Snapshot> PlanningService::reload() const {
  std::lock_guard serial(reload_mutex_);
  auto fresh = std::make_shared<const Snapshot>(builder_(next_version_));
  ++next_version_;
  std::lock_guard lock(current_mutex_);
  current_ = fresh;
  return fresh;
}

Response PlanningService::handle(const std::string& method, const std::string& path, const Query& query,
                                 const std::string& body) const {
  // One snapshot per request, so every field of a response is consistent.
  auto snap = snapshot();
  const Snapshot& s = *snap;
  struct Route {
    const char* path;
    const char* method;
  };
  static constexpr Route kRoutes[] = {{"/api/releases", "GET"}, {"/api/issues", "GET"}, {"/api/classify", "POST"},
                                      {"/api/plan", "POST"},    {"/api/model", "GET"},  {"/api/reload", "POST"}};
  const Route* route = nullptr;
  for (const auto& r : kRoutes)
    if (path == r.path) route = &r;
  if (!route) return error_response(404, "not_found", "no route for " + path, &s);
  if (method != route->method)
    return error_response(405, "method_not_allowed", path + " expects " + route->method, &s);

  try {
    if (path == "/api/releases") return get_releases(s);
    if (path == "/api/issues") return get_issues(s, query);
    if (path == "/api/classify") return post_classify(s, body);
    if (path == "/api/plan") return post_plan(s, body);
    if (path == "/api/model") return get_model(s);
    // /api/reload
    try {
      auto fresh = reload();
      ordered_json j;
      j["reloaded"] = true;
      return json_response(200, std::move(j), fresh.get());
    } catch (const Error& e) {
      return domain_error(e, &s);
    }
  } catch (const Error& e) {
    return domain_error(e, &s);
  }
}

void serve(const PlanningService& service, const std::string& host, int port) {
  httplib::Server server;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    Query query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    Response r = service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  std::cerr << "rulcast: serving on http://" << host << ":" << port << "\n";
  if (!server.listen(host, port)) throw Error(Errc::io, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace rulcast::service
