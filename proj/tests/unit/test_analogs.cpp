#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "rulcast/analogs.hpp"
#include "rulcast/error.hpp"

using namespace rulcast;
using namespace rulcast::analogs;

namespace {

std::vector<FeatureVector> line(std::initializer_list<double> xs) {
  std::vector<FeatureVector> out;
  for (double x : xs) out.push_back({x});
  return out;
}

std::vector<FeatureVector> random_points(std::mt19937& gen, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> d(-5, 5);
  std::vector<FeatureVector> pts(n, FeatureVector(dim));
  for (auto& p : pts)
    for (auto& v : p) v = (gen() % 3 == 0) ? std::round(d(gen)) : d(gen);
  return pts;
}

}  // namespace

TEST_SUITE("analogs") {
  TEST_CASE("small fixtures") {
    auto m = fit_best(line({0, 0, 10, 10}), {2, 42}, 10);
    CHECK(m.wcss == 0.0);
    CHECK(m.assignments == std::vector<std::size_t>{0, 0, 1, 1});

    auto four = line({1, 2, 9, 10});
    auto two = fit_best(four, {2, 42}, 10);
    CHECK(two.wcss == 1.0);
    CHECK(two.centroids[0][0] == 1.5);
    CHECK(two.centroids[1][0] == 9.5);
    CHECK(fit_best(four, {4, 42}, 10).wcss == 0.0);

    auto curve = wcss_curve(four, 4, 42);
    CHECK(curve.curve[0].wcss == 65.0);  // 4.5² + 3.5² + 3.5² + 4.5²
    CHECK(curve.curve[1].wcss == 1.0);
  }

  TEST_CASE("parameter errors") {
    CHECK_THROWS_AS(fit_kmeans(line({1, 2}), {3, 1}), Error);
    CHECK_THROWS_AS(fit_kmeans({}, {1, 1}), Error);
    auto m = fit_kmeans(line({1, 2, 3}), {1, 1});
    CHECK_THROWS_AS(assign(m, {1.0, 2.0}), Error);
  }

  TEST_CASE("assignment tie-break and centroids") {
    ClusterModel m;
    m.k = 2;
    m.centroids = {{0.0}, {2.0}};
    CHECK(assign(m, {1.0}) == 0);
    CHECK(assign(m, {2.0}) == 1);
  }

  TEST_CASE("k-means matches the exhaustive minimum") {
    std::mt19937 gen(101);
    for (int trial = 0; trial < 60; ++trial) {
      std::size_t k = 1 + gen() % 3;
      std::size_t n = k + gen() % (9 - k);
      auto pts = random_points(gen, n, 1 + gen() % 2);
      auto m = fit_best(pts, {k, static_cast<std::uint64_t>(trial)}, 10);
      CHECK(m.wcss == doctest::Approx(oracle::brute_force_wcss(pts, k)).epsilon(1e-9));
    }
  }

  TEST_CASE("per-iteration J is non-increasing and convergence is locally optimal") {
    std::mt19937 gen(202);
    for (int trial = 0; trial < 100; ++trial) {
      auto pts = random_points(gen, 5 + gen() % 20, 1 + gen() % 3);
      std::size_t k = 1 + gen() % 4;
      auto m = fit_kmeans(pts, {k, static_cast<std::uint64_t>(trial)});
      for (std::size_t i = 1; i < m.wcss_trace.size(); ++i) CHECK(m.wcss_trace[i] <= m.wcss_trace[i - 1] + 1e-12);
      CHECK(m.wcss == doctest::Approx(wcss(pts, m.centroids, m.assignments)));
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t c = 0; c < k; ++c)
          CHECK(squared_distance(pts[i], m.centroids[m.assignments[i]]) <= squared_distance(pts[i], m.centroids[c]) + 1e-12);
    }
  }

  TEST_CASE("determinism and canonical labels") {
    std::mt19937 gen(303);
    auto pts = random_points(gen, 12, 2);
    auto a = fit_best(pts, {3, 9}, 5);
    auto b = fit_best(pts, {3, 9}, 5);
    CHECK(a.assignments == b.assignments);
    CHECK(a.centroids == b.centroids);
    CHECK(a.assignments[0] == 0);
    std::size_t seen = 0;
    for (auto c : a.assignments) {
      CHECK(c <= seen);
      if (c == seen) ++seen;
    }
  }

  TEST_CASE("elbow curve is non-increasing") {
    std::mt19937 gen(404);
    for (int trial = 0; trial < 40; ++trial) {
      auto pts = random_points(gen, 6 + gen() % 10, 1 + gen() % 2);
      auto e = wcss_curve(pts, 5, trial);
      for (std::size_t i = 1; i < e.curve.size(); ++i) CHECK(e.curve[i].wcss <= e.curve[i - 1].wcss);
      CHECK(e.suggested_k >= 2);
      CHECK(e.suggested_k <= 4);
    }
    CHECK(wcss_curve(line({1, 2, 3}), 2, 1).suggested_k == 1);
  }

  TEST_CASE("standardizer") {
    auto s = Standardizer::fit(line({1, 2, 3, 4}));
    CHECK(s.mean()[0] == 2.5);
    CHECK(s.stddev()[0] == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.apply(FeatureVector{2.5})[0] == 0.0);
    CHECK_THROWS_AS(Standardizer::fit(line({3, 3, 3})), Error);
  }

  TEST_CASE("cluster labels") {
    CHECK(cluster_label(0) == "A");
    CHECK(cluster_label(1) == "B");
    CHECK(parse_cluster_label("b") == 1);
    CHECK(parse_cluster_label("2") == 2);
    CHECK(parse_cluster_label(cluster_label(30)) == 30);
    CHECK_THROWS_AS(parse_cluster_label("??"), Error);
  }
}
