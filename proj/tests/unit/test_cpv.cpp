#include <doctest.h>

#include <random>
#include <sstream>

#include "rulcast/cpv.hpp"
#include "rulcast/error.hpp"

using namespace rulcast;
using namespace rulcast::corpus;

namespace {

QuarterPoints qp(const char* s) { return QuarterPoints::parse(s); }

IssueRecord make(std::string id, int sp, ImpactScale impact, Sign sign, std::optional<std::string> release = {}) {
  IssueRecord r;
  r.id = std::move(id);
  r.reported_release = "1.0";
  r.resolved_release = std::move(release);
  r.story_points = sp;
  r.impact = impact;
  r.sign = sign;
  return r;
}

}  // namespace

TEST_SUITE("cpv") {
  TEST_CASE("quarter points parse and render exactly") {
    CHECK(qp("36.5").units() == 146);
    CHECK(qp("-0.75").units() == -3);
    CHECK(qp("37").str() == "37");
    CHECK(qp("-4.25").str() == "-4.25");
    CHECK(qp("0.50").str() == "0.5");
    CHECK_THROWS_AS(qp("0.3"), Error);
    CHECK_THROWS_AS(qp("abc"), Error);
    CHECK(QuarterPoints::from_double(16.75) == qp("16.75"));
    CHECK_THROWS_AS(QuarterPoints::from_double(0.1), Error);
  }

  TEST_CASE("release delta examples") {
    CHECK(cpv::release_delta({}) == QuarterPoints());
    CHECK(cpv::release_delta({make("a", 1, ImpactScale::major, Sign::improving)}) == qp("-0.75"));
    CHECK(cpv::release_delta({make("a", 3, ImpactScale::critical, Sign::degrading),
                              make("b", 5, ImpactScale::medium, Sign::degrading),
                              make("c", 2, ImpactScale::minor, Sign::improving)}) == qp("5"));
  }

  TEST_CASE("unsized issue names the id") {
    auto r = make("BZ-9", 1, ImpactScale::minor, Sign::degrading);
    r.story_points.reset();
    try {
      cpv::release_delta({r});
      FAIL("expected sizing error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::sizing_missing);
      CHECK(std::string(e.what()).find("BZ-9") != std::string::npos);
    }
  }

  TEST_CASE("cumulative series examples") {
    CHECK(cpv::cumulative_series({}, {qp("5")}) == std::vector<QuarterPoints>{qp("5")});
    CHECK(cpv::cumulative_series(qp("37.75"), {qp("-0.75"), qp("-0.5")}) ==
          std::vector<QuarterPoints>{qp("37"), qp("36.5")});
    CHECK(cpv::cumulative_series(qp("36.5"), {qp("19"), qp("-4.25"), qp("4"), qp("2"), qp("3"), qp("16.75")}) ==
          std::vector<QuarterPoints>{qp("55.5"), qp("51.25"), qp("55.25"), qp("57.25"), qp("60.25"), qp("77")});
  }

  TEST_CASE("algebraic properties") {
    std::mt19937 gen(23);
    const int sps[] = {1, 2, 3, 5, 8};
    auto random_issue = [&](int i) {
      return make("i" + std::to_string(i), sps[gen() % 5], static_cast<ImpactScale>(gen() % 4),
                  gen() % 2 ? Sign::degrading : Sign::improving);
    };
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<IssueRecord> a, b;
      for (int i = 0; i < static_cast<int>(gen() % 6); ++i) a.push_back(random_issue(i));
      for (int i = 0; i < static_cast<int>(gen() % 6); ++i) b.push_back(random_issue(100 + i));
      auto ab = a;
      ab.insert(ab.end(), b.begin(), b.end());
      CHECK(cpv::release_delta(ab) == cpv::release_delta(a) + cpv::release_delta(b));

      auto flipped = ab;
      for (auto& r : flipped) r.sign = r.sign == Sign::degrading ? Sign::improving : Sign::degrading;
      CHECK(cpv::release_delta(flipped) == -cpv::release_delta(ab));

      std::vector<QuarterPoints> deltas;
      QuarterPoints sum;
      for (int i = 0; i < 6; ++i) {
        deltas.push_back(QuarterPoints::from_units(static_cast<int>(gen() % 200) - 100));
        sum += deltas.back();
      }
      auto base = QuarterPoints::from_units(static_cast<int>(gen() % 400));
      auto series = cpv::cumulative_series(base, deltas);
      CHECK(series.size() == deltas.size());
      CHECK(series.back() == base + sum);

      // moving one issue between releases only touches the span between them
      std::vector<std::vector<IssueRecord>> releases(6);
      for (int i = 0; i < 12; ++i) releases[gen() % 6].push_back(random_issue(200 + i));
      std::size_t from = gen() % 6, to = gen() % 6;
      if (releases[from].empty()) continue;
      auto moved = releases;
      moved[to].push_back(moved[from].back());
      moved[from].pop_back();
      auto cum = [&](const std::vector<std::vector<IssueRecord>>& rel) {
        std::vector<QuarterPoints> d;
        for (const auto& r : rel) d.push_back(cpv::release_delta(r));
        return cpv::cumulative_series(base, d);
      };
      auto before = cum(releases), after = cum(moved);
      std::size_t lo = std::min(from, to), hi = std::max(from, to);
      for (std::size_t i = 0; i < 6; ++i)
        if (i < lo || i >= hi) CHECK(before[i] == after[i]);
    }
  }

  TEST_CASE("history build, resets and export") {
    std::vector<IssueRecord> issues{make("a", 8, ImpactScale::critical, Sign::degrading, "1.0"),
                                    make("b", 1, ImpactScale::major, Sign::improving, "1.2"),
                                    make("c", 2, ImpactScale::minor, Sign::degrading)};
    auto h = cpv::build_history(issues, {"1.1", "1.2"});
    REQUIRE(h.size() == 3);
    CHECK(h[0].version == "1.0");
    CHECK(h[1].delta == QuarterPoints());
    CHECK(h[2].cumulative == qp("7.25"));
    CHECK(h[2].issue_ids == std::vector<std::string>{"b"});

    cpv::HistoryOptions opts;
    opts.resets["1.2"] = qp("1");
    auto reset = cpv::build_history(issues, {"1.1"}, {}, opts);
    CHECK(reset[2].cumulative == qp("0.25"));

    std::ostringstream out;
    cpv::write_series_csv(out, h);
    CHECK(out.str() == "version,ordinal,delta_cpv,cumulative_cpv\n1.0,0,8,8\n1.1,1,0,8\n1.2,2,-0.75,7.25\n");
  }
}
