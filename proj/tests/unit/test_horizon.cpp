#include <doctest.h>

#include <random>

#include "rulcast/error.hpp"
#include "rulcast/horizon.hpp"

using namespace rulcast;
using namespace rulcast::horizon;
using corpus::ImpactScale;
using corpus::IssueRecord;
using corpus::Sign;

namespace {

QuarterPoints qp(const char* s) { return QuarterPoints::parse(s); }

IssueRecord pool_issue(std::string id, int sp, ImpactScale impact, Sign sign) {
  IssueRecord r;
  r.id = std::move(id);
  r.reported_release = "1.0";
  r.story_points = sp;
  r.impact = impact;
  r.sign = sign;
  return r;
}

// One cluster at 0 in standardized space, identity standardizer.
ProjectionModel single_line(double m, double b, double x_min = 0, double x_max = 1e9) {
  ProjectionModel p;
  p.standardizer = analogs::Standardizer({0.0}, {1.0});
  p.clusters.k = 1;
  p.clusters.centroids = {{0.0}};
  prognosis::RegressionModel line;
  line.slope = m;
  line.intercept = b;
  line.x_min = x_min;
  line.x_max = x_max;
  p.regressions = {line};
  p.unfittable_reasons = {""};
  return p;
}

RulReport report(std::string label, std::vector<double> rts, double threshold) {
  std::vector<ProjectedRelease> rel;
  for (double r : rts) rel.push_back({"v", {}, {}, 0, r});
  return make_report(std::move(label), std::move(rel), threshold);
}

}  // namespace

TEST_SUITE("horizon") {
  TEST_CASE("build plan examples") {
    std::vector<IssueRecord> pool{pool_issue("a", 8, ImpactScale::critical, Sign::degrading),
                                  pool_issue("b", 1, ImpactScale::major, Sign::improving)};
    ReleasePlan empty{"E", {{"2.0", {}, {}}}};
    auto s = build_plan(empty, pool, qp("36.5"));
    CHECK(s[0].delta == QuarterPoints());
    CHECK(s[0].cumulative == qp("36.5"));

    ReleasePlan overrides{"C1", {}};
    const char* deltas[] = {"19", "-4.25", "4", "2", "3", "16.75"};
    for (int i = 0; i < 6; ++i) overrides.releases.push_back({"6." + std::to_string(i), {}, qp(deltas[i])});
    auto c1 = build_plan(overrides, pool, qp("36.5"), std::string("5.0.6"));
    std::vector<QuarterPoints> cum;
    for (auto& r : c1) cum.push_back(r.cumulative);
    CHECK(cum == std::vector<QuarterPoints>{qp("55.5"), qp("51.25"), qp("55.25"), qp("57.25"), qp("60.25"), qp("77")});

    ReleasePlan twice{"T", {{"2.0", {"a"}, {}}, {"2.1", {"a"}, {}}}};
    try {
      build_plan(twice, pool, {});
      FAIL("expected validation error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::plan_validation);
    }
  }

  TEST_CASE("plan validation") {
    auto resolved = pool_issue("r", 1, ImpactScale::minor, Sign::degrading);
    resolved.resolved_release = "1.5";
    auto unsized = pool_issue("u", 1, ImpactScale::minor, Sign::degrading);
    unsized.story_points.reset();
    std::vector<IssueRecord> pool{resolved, unsized, pool_issue("a", 2, ImpactScale::minor, Sign::degrading)};
    auto code = [&](ReleasePlan plan, std::optional<std::string> last = {}) {
      try {
        build_plan(plan, pool, {}, last);
      } catch (const Error& e) {
        return e.code();
      }
      return Errc::io;  // sentinel for "no error"
    };
    CHECK(code({"x", {{"2.0", {"missing"}, {}}}}) == Errc::plan_validation);
    CHECK(code({"x", {{"2.0", {"r"}, {}}}}) == Errc::plan_validation);
    CHECK(code({"x", {{"2.0", {"u"}, {}}}}) == Errc::sizing_missing);
    CHECK(code({"x", {{"2.0", {}, {}}, {"1.9", {}, {}}}}) == Errc::plan_validation);
    CHECK(code({"x", {{"2.0", {"a"}, {}}}}, std::string("2.0")) == Errc::plan_validation);
    CHECK(code({"x", {{"2.0", {"a"}, {}}}}, std::string("1.9")) == Errc::io);
  }

  TEST_CASE("plan documents") {
    auto doc = nlohmann::json::parse(R"({"threshold_ms": 8000, "combos": [
      {"label": "C", "releases": [{"version": "2.0", "issues": ["a"]}, {"version": "2.1", "delta_cpv": "-4.25"},
                                  {"version": "2.2", "delta_cpv": 3.5}]}]})");
    auto plans = parse_plans(doc);
    CHECK(plans.threshold_ms == 8000.0);
    REQUIRE(plans.combos.size() == 1);
    CHECK(plans.combos[0].releases[1].delta_override == qp("-4.25"));
    CHECK(parse_plans(nlohmann::json::parse(plans_to_json(plans).dump())).combos[0].releases[2].delta_override ==
          qp("3.5"));

    for (const char* bad : {R"([])", R"({"combos": 3})", R"({"combos": [{"releases": []}]})",
                            R"({"combos": [{"label": "x", "releases": [{"version": "2.0", "issues": ["a"], "delta_cpv": 1}]}]})",
                            R"({"combos": [{"label": "x", "releases": [{"version": "2.0", "delta_cpv": 0.3}]}]})",
                            R"({"combos": [{"label": "x", "releases": [{"version": "v2", "issues": []}]}]})"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_plans(nlohmann::json::parse(bad)), Error);
    }
  }

  TEST_CASE("projection") {
    auto model = single_line(100, 1000, 40, 50);
    std::vector<PlannedCpv> series{{"2.0", {}, qp("40")}, {"2.1", {}, qp("60")}};
    auto p = project_rt(series, model);
    CHECK(p[0].predicted_rt_ms == 5000.0);
    CHECK(p[1].predicted_rt_ms == 7000.0);
    CHECK_FALSE(p[0].extrapolated);
    CHECK(p[1].extrapolated);

    auto two = model;
    two.clusters.k = 2;
    two.clusters.centroids = {{0.0}, {100.0}};
    two.regressions.push_back(std::nullopt);
    two.unfittable_reasons.push_back("insufficient data: 2 points");
    try {
      project_rt({{"9.9", {}, qp("99")}}, two);
      FAIL("expected unfittable cluster");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unfittable_cluster);
      CHECK(std::string(e.what()).find("9.9") != std::string::npos);
    }
  }

  TEST_CASE("rul estimation") {
    auto e = estimate_rul({5000, 7000, 8900, 9200, 9800}, 9000);
    CHECK(e.first_crossing == std::size_t{3});
    CHECK(e.rul_releases == 3);
    CHECK_FALSE(e.censored);
    auto c = estimate_rul({1, 2, 9000}, 9000);
    CHECK(c.censored);
    CHECK(c.rul_releases == 3);
    CHECK(estimate_rul({9500, 1}, 9000).rul_releases == 0);
    CHECK_THROWS_AS(estimate_rul({}, 9000), Error);
    CHECK_THROWS_AS(estimate_rul({1}, 0), Error);
  }

  TEST_CASE("ranking") {
    std::vector<RulReport> r{report("C1", {1, 1, 1, 1, 1, 9999}, 9000), report("C2", {1, 1, 1, 9999}, 9000),
                             report("C3", {1, 1, 1, 1, 9999}, 9000), report("C4", {1, 1, 9999}, 9000)};
    auto ranked = rank_combos(r);
    CHECK(ranked[0].label == "C1");
    CHECK(ranked[1].label == "C3");
    CHECK(ranked[2].label == "C2");
    CHECK(ranked[3].label == "C4");

    auto censored = rank_combos({report("Z", {10, 20}, 9000), report("Y", {10, 30}, 9000), report("X", {10, 20}, 9000),
                                 report("W", {9999}, 9000)});
    CHECK(censored[0].label == "X");
    CHECK(censored[1].label == "Z");
    CHECK(censored[2].label == "Y");
    CHECK(censored[3].label == "W");

    try {
      rank_combos({report("A", {1}, 9000), report("B", {1}, 8000)});
      FAIL("expected comparison error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::comparison);
    }
  }

  TEST_CASE("report json") {
    auto r = report("C", {5000, 9500}, 9000);
    auto j = report_to_json(r);
    CHECK(j["rul_releases"] == 1);
    CHECK(j["first_crossing"] == 1);
    CHECK(j["releases"][1]["crossed"] == true);
    CHECK(j["releases"][0]["crossed"] == false);
  }

  TEST_CASE("monotonicity properties") {
    std::mt19937 gen(77);
    const int sps[] = {1, 2, 3, 5, 8};
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<IssueRecord> pool;
      for (int i = 0; i < 12; ++i)
        pool.push_back(pool_issue("i" + std::to_string(i), sps[gen() % 5], static_cast<ImpactScale>(gen() % 4),
                                  gen() % 3 ? Sign::degrading : Sign::improving));
      ReleasePlan plan{"P", {}};
      for (int r = 0; r < 5; ++r) plan.releases.push_back({"2." + std::to_string(r), {}, {}});
      for (const auto& issue : pool) plan.releases[gen() % 5].issue_ids.push_back(issue.id);
      auto model = single_line(50 + gen() % 200, 3000 + gen() % 2000);
      auto rul_for = [&](const ReleasePlan& p, const std::vector<IssueRecord>& issues, double threshold) {
        return make_report("P", project_rt(build_plan(p, issues, qp("30"), {}), model), threshold);
      };
      auto base = rul_for(plan, pool, 9000);
      CHECK(rul_for(plan, pool, 9500).rul_releases >= base.rul_releases);

      auto loaded_pool = pool;
      loaded_pool.push_back(pool_issue("extra", sps[gen() % 5], static_cast<ImpactScale>(gen() % 4), Sign::degrading));
      auto loaded = plan;
      loaded.releases[gen() % 5].issue_ids.push_back("extra");
      CHECK(rul_for(loaded, loaded_pool, 9000).rul_releases <= base.rul_releases);

      auto permuted = plan;
      for (auto& rel : permuted.releases) std::shuffle(rel.issue_ids.begin(), rel.issue_ids.end(), gen);
      auto p = rul_for(permuted, pool, 9000);
      CHECK(p.rul_releases == base.rul_releases);
      CHECK(report_to_json(p) == report_to_json(base));

      double max_rt = 0;
      for (const auto& rel : base.releases) max_rt = std::max(max_rt, rel.predicted_rt_ms);
      CHECK(base.censored == (max_rt <= 9000));
    }
  }
}
