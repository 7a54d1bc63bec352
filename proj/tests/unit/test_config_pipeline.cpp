#include <doctest.h>

#include <fstream>

#include "rulcast/config.hpp"
#include "rulcast/error.hpp"
#include "rulcast/pipeline.hpp"

using namespace rulcast;

namespace {

const std::string kFixture = RULCAST_FIXTURE_DIR;

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config parsing") {
    auto c = parse_config("# comment\nissues = \"a.csv\"\nk = 3\nthreshold_ms = 8000\nfeatures = cumulative+delta\n",
                          "/base");
    CHECK(c.issues == "/base/a.csv");
    CHECK(c.k == std::size_t{3});
    CHECK(c.threshold_ms == 8000.0);
    CHECK(c.features == horizon::FeatureSet::cumulative_delta);
    CHECK_FALSE(parse_config("k = auto").k.has_value());
    CHECK(parse_config("issues = /abs/x.csv", "/base").issues == "/abs/x.csv");
    for (const char* bad : {"unknown = 1", "alpha = 0", "train_fraction = 1.5", "seed = x",
                            "threshold_ms = -1", "features = cubic"}) {
      CAPTURE(bad);
      try {
        parse_config(bad);
        FAIL("expected a parameter error");
      } catch (const Error& e) {
        CHECK(e.code() == Errc::parameter);
      }
    }
    CHECK_THROWS_AS(parse_config("no equals sign"), Error);
    CHECK_THROWS_AS(load_config("/nonexistent/run.toml"), Error);
  }

  TEST_CASE("fixture snapshot reproduces the analog partition") {
    auto config = load_config(kFixture + "/run.toml");
    auto s = build_snapshot(config);
    CHECK(s.predicted_ids.size() == 2);
    REQUIRE(s.measured.size() == 10);
    for (std::size_t i : s.measured) {
      const auto& h = s.history[i];
      CAPTURE(h.record.version);
      REQUIRE(h.cluster.has_value());
      bool b = h.record.version == "5.0.2" || h.record.version == "5.0.5" || h.record.version == "5.0.6";
      CHECK(*h.cluster == (b ? 1u : 0u));
    }
    REQUIRE(s.projection.regressions[0].has_value());
    CHECK(s.projection.regressions[0]->r_squared > 0.95);
    CHECK(s.projection.regressions[0]->slope > 0);

    auto plans = horizon::load_plans_file(config.plans);
    auto ranked = run_plans(s, plans);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].label == "Combo-1");
    CHECK(ranked[0].rul_releases == 5);
  }

  TEST_CASE("snapshot build is deterministic") {
    auto config = load_config(kFixture + "/run.toml");
    auto a = build_snapshot(config), b = build_snapshot(config);
    CHECK(a.projection.clusters.assignments == b.projection.clusters.assignments);
    CHECK(a.projection.clusters.centroids == b.projection.clusters.centroids);
  }

  TEST_CASE("k beyond the measured releases is a parameter error") {
    auto config = load_config(kFixture + "/run.toml");
    config.k = 99;
    try {
      build_snapshot(config);
      FAIL("expected a parameter error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parameter);
    }
  }

  TEST_CASE("duplicate combo labels are rejected") {
    auto config = load_config(kFixture + "/run.toml");
    auto s = build_snapshot(config);
    auto plans = horizon::load_plans_file(config.plans);
    plans.combos[1].label = plans.combos[0].label;
    CHECK_THROWS_AS(run_plans(s, plans), Error);
  }
}
