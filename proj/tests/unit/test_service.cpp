#include <doctest.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rulcast/error.hpp"
#include "rulcast/service.hpp"

using namespace rulcast;
using namespace rulcast::service;
using nlohmann::json;

namespace {

const std::string kFixture = RULCAST_FIXTURE_DIR;

RunConfig fixture_config() { return load_config(kFixture + "/run.toml"); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json body_of(const Response& r) { return json::parse(r.body); }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("plan endpoint ranks the fixture combos") {
    PlanningService svc(fixture_config());
    auto r = svc.handle("POST", "/api/plan", {}, read_file(kFixture + "/combos.json"));
    REQUIRE(r.status == 200);
    auto j = body_of(r);
    CHECK(j["snapshot"] == 1);
    CHECK(j["ranking"][0] == "Combo-1");
    CHECK(j["combos"][0]["rul_releases"] == 5);
    CHECK(j["ranking"] == json::array({"Combo-1", "Combo-4", "Combo-3", "Combo-2"}));
  }

  TEST_CASE("status codes") {
    PlanningService svc(fixture_config());
    auto dup = R"({"combos": [{"label": "X", "releases": [{"version": "6.0.0", "issues": ["BZ-1021"]},
                                                          {"version": "6.1.0", "issues": ["BZ-1021"]}]}]})";
    auto r = svc.handle("POST", "/api/plan", {}, dup);
    CHECK(r.status == 422);
    CHECK(body_of(r)["error"]["code"] == "plan-validation");
    CHECK(svc.handle("POST", "/api/plan", {}, "{not json").status == 400);
    CHECK(svc.handle("POST", "/api/plan", {}, R"({"combos": 1})").status == 400);
    CHECK(svc.handle("GET", "/api/nothing", {}, "").status == 404);
    CHECK(svc.handle("GET", "/api/plan", {}, "").status == 405);
    CHECK(svc.handle("GET", "/api/issues", {{"status", "open"}}, "").status == 400);
  }

  TEST_CASE("read endpoints") {
    PlanningService svc(fixture_config());
    auto releases = body_of(svc.handle("GET", "/api/releases", {}, ""));
    CHECK(releases["releases"].size() > 0);
    auto all = body_of(svc.handle("GET", "/api/issues", {}, ""))["issues"];
    auto open = body_of(svc.handle("GET", "/api/issues", {{"status", "unresolved"}}, ""))["issues"];
    auto done = body_of(svc.handle("GET", "/api/issues", {{"status", "resolved"}}, ""))["issues"];
    CHECK(all.size() == open.size() + done.size());
    CHECK(open.size() > 0);
    auto model = svc.handle("GET", "/api/model", {}, "");
    CHECK(model.status == 200);
    CHECK(body_of(model)["k"] == 2);
  }

  TEST_CASE("classify") {
    PlanningService svc(fixture_config());
    auto r = svc.handle("POST", "/api/classify", {}, R"({"text": "Server overloaded under peak traffic"})");
    REQUIRE(r.status == 200);
    auto j = body_of(r);
    CHECK(j["category"] == "server");
    double sum = 0;
    for (const auto& p : j["posterior"]) sum += p["probability"].get<double>();
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    // No tokens: the posterior is the prior.
    auto empty = body_of(svc.handle("POST", "/api/classify", {}, R"({"text": ""})"));
    const auto& sizer = *svc.snapshot()->sizer;
    for (std::size_t i = 0; i < sizer.classes().size(); ++i)
      CHECK(empty["posterior"][i]["probability"].get<double>() == doctest::Approx(sizer.prior(i)));
    CHECK(svc.handle("POST", "/api/classify", {}, R"({"txt": 1})").status == 400);
  }

  TEST_CASE("reload swaps snapshots and survives failures") {
    auto config = fixture_config();
    bool fail = false;
    PlanningService svc([&](std::uint64_t version) {
      if (fail) throw Error(Errc::io, "source unavailable");
      return build_snapshot(config, BuildDepth::full, version);
    });
    CHECK(svc.snapshot()->version == 1);
    auto ok = svc.handle("POST", "/api/reload", {}, "");
    CHECK(ok.status == 200);
    CHECK(body_of(ok)["snapshot"] == 2);
    fail = true;
    auto bad = svc.handle("POST", "/api/reload", {}, "");
    CHECK(bad.status == 422);
    CHECK(svc.snapshot()->version == 2);
    CHECK(body_of(svc.handle("GET", "/api/releases", {}, ""))["snapshot"] == 2);
  }

  TEST_CASE("in-flight requests keep their snapshot") {
    PlanningService svc(fixture_config());
    auto held = svc.snapshot();
    svc.reload();
    CHECK(held->version == 1);
    CHECK(svc.snapshot()->version == 2);
  }
}
