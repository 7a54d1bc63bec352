#include "rulcast/analogs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"

namespace rulcast::analogs {

namespace {

void check_points(const std::vector<FeatureVector>& points, std::size_t k) {
  if (points.empty()) throw Error(Errc::parameter, "k-means needs at least one point");
  if (k < 1) throw Error(Errc::parameter, "k must be >= 1");
  if (k > points.size())
    throw Error(Errc::parameter,
                "k = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(points.size()) + ")");
  const std::size_t dim = points.front().size();
  if (dim == 0) throw Error(Errc::parameter, "feature vectors are empty");
  for (const auto& p : points)
    if (p.size() != dim) throw Error(Errc::parameter, "feature vectors differ in dimensionality");
}

std::vector<FeatureVector> means(const std::vector<FeatureVector>& points, const std::vector<std::size_t>& assign,
                                 const std::vector<FeatureVector>& previous) {
  const std::size_t k = previous.size(), dim = points.front().size();
  std::vector<FeatureVector> sums(k, FeatureVector(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[assign[i]];
    for (std::size_t d = 0; d < dim; ++d) sums[assign[i]][d] += points[i][d];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      sums[c] = previous[c];
      continue;
    }
    for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
  }
  return sums;
}

// Reseeds each empty cluster at the point farthest from its centroid, taken
// from a cluster that can spare it.
void repair_empty(const std::vector<FeatureVector>& points, std::vector<FeatureVector>& centroids,
                  std::vector<std::size_t>& assign) {
  const std::size_t k = centroids.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assign) ++counts[a];
    if (counts[c] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[assign[i]] < 2) continue;
      double d = squared_distance(points[i], centroids[assign[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) return;
    assign[far] = c;
    centroids[c] = points[far];
  }
}

std::vector<std::size_t> assign_all(const std::vector<FeatureVector>& points,
                                    const std::vector<FeatureVector>& centroids) {
  std::vector<std::size_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = nearest(centroids, points[i]);
  return out;
}

void canonicalize(ClusterModel& m) {
  std::vector<std::size_t> remap(m.k, m.k);
  std::size_t next = 0;
  for (std::size_t a : m.assignments)
    if (remap[a] == m.k) remap[a] = next++;
  for (std::size_t c = 0; c < m.k; ++c)
    if (remap[c] == m.k) remap[c] = next++;
  std::vector<FeatureVector> centroids(m.k);
  for (std::size_t c = 0; c < m.k; ++c) centroids[remap[c]] = std::move(m.centroids[c]);
  m.centroids = std::move(centroids);
  for (std::size_t& a : m.assignments) a = remap[a];
}

std::vector<FeatureVector> kmeanspp_init(const std::vector<FeatureVector>& points, std::size_t k, Rng& rng) {
  std::vector<FeatureVector> centroids;
  centroids.push_back(points[uniform_index(rng, points.size())]);
  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = squared_distance(points[i], centroids[nearest(centroids, points[i])]);
      total += d2[i];
    }
    std::size_t pick = points.size() - 1;
    if (total <= 0) {
      pick = uniform_index(rng, points.size());
    } else {
      double target = uniform01(rng) * total, acc = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (d2[i] > 0 && target < acc) {
          pick = i;
          break;
        }
      }
      // rounding can leave the draw past the last positive weight
      while (d2[pick] <= 0 && pick > 0) --pick;
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

}  // namespace

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != stddev_.size()) throw Error(Errc::parameter, "standardizer dimensions disagree");
  for (double s : stddev_)
    if (!(s > 0)) throw Error(Errc::degenerate, "standard deviation must be > 0 for standardization");
}

Standardizer Standardizer::fit(const std::vector<FeatureVector>& points) {
  check_points(points, 1);
  const std::size_t dim = points.front().size();
  const double n = static_cast<double>(points.size());
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
  for (double& m : mean) m /= n;
  for (const auto& p : points)
    for (std::size_t d = 0; d < dim; ++d) sd[d] += (p[d] - mean[d]) * (p[d] - mean[d]);
  for (double& s : sd) s = std::sqrt(s / n);
  return Standardizer(std::move(mean), std::move(sd));
}

FeatureVector Standardizer::apply(const FeatureVector& raw) const {
  if (raw.size() != mean_.size()) throw Error(Errc::parameter, "feature dimensionality mismatch");
  FeatureVector out(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) out[d] = (raw[d] - mean_[d]) / stddev_[d];
  return out;
}

std::vector<FeatureVector> Standardizer::apply(const std::vector<FeatureVector>& raw) const {
  std::vector<FeatureVector> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(apply(r));
  return out;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

double wcss(const std::vector<FeatureVector>& points, const std::vector<FeatureVector>& centroids,
            const std::vector<std::size_t>& assignments) {
  double j = 0;
  for (std::size_t i = 0; i < points.size(); ++i) j += squared_distance(points[i], centroids[assignments[i]]);
  return j;
}

std::size_t nearest(const std::vector<FeatureVector>& centroids, const FeatureVector& point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = squared_distance(centroids[c], point);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::size_t assign(const ClusterModel& model, const FeatureVector& point) {
  if (model.centroids.empty()) throw Error(Errc::parameter, "cluster model has no centroids");
  if (point.size() != model.centroids.front().size())
    throw Error(Errc::parameter, "point has " + std::to_string(point.size()) + " features, model expects " +
                                     std::to_string(model.centroids.front().size()));
  return nearest(model.centroids, point);
}

ClusterModel fit_kmeans_from(const std::vector<FeatureVector>& points, std::vector<FeatureVector> centroids,
                             const KMeansParams& params) {
  check_points(points, params.k);
  if (centroids.size() != params.k) throw Error(Errc::parameter, "initial centroid count differs from k");
  if (params.max_iter < 1) throw Error(Errc::parameter, "max_iter must be >= 1");
  if (!(params.tol >= 0)) throw Error(Errc::parameter, "tol must be >= 0");

  ClusterModel m;
  m.k = params.k;
  m.seed = params.seed;
  std::vector<std::size_t> previous;
  for (std::size_t iter = 1; iter <= params.max_iter; ++iter) {
    std::vector<std::size_t> current = assign_all(points, centroids);
    repair_empty(points, centroids, current);
    m.wcss_trace.push_back(wcss(points, centroids, current));
    std::vector<FeatureVector> updated = means(points, current, centroids);
    double shift = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c)
      shift = std::max(shift, std::sqrt(squared_distance(updated[c], centroids[c])));
    centroids = std::move(updated);
    m.iterations = iter;
    if (current == previous || shift <= params.tol) break;
    previous = std::move(current);
  }
  m.assignments = assign_all(points, centroids);
  repair_empty(points, centroids, m.assignments);
  m.centroids = means(points, m.assignments, centroids);
  m.wcss = wcss(points, m.centroids, m.assignments);
  m.wcss_trace.push_back(m.wcss);
  canonicalize(m);
  return m;
}

ClusterModel fit_kmeans(const std::vector<FeatureVector>& points, const KMeansParams& params) {
  check_points(points, params.k);
  Rng rng(params.seed);
  return fit_kmeans_from(points, kmeanspp_init(points, params.k, rng), params);
}

ClusterModel fit_best(const std::vector<FeatureVector>& points, const KMeansParams& params, std::size_t restarts) {
  if (restarts < 1) throw Error(Errc::parameter, "restarts must be >= 1");
  ClusterModel best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    KMeansParams run = params;
    run.seed = derive_seed(params.seed, params.k, r);
    ClusterModel m = fit_kmeans(points, run);
    if (!have || m.wcss < best.wcss) {
      best = std::move(m);
      have = true;
    }
  }
  return best;
}

ElbowCurve wcss_curve(const std::vector<FeatureVector>& points, std::size_t k_max, std::uint64_t seed,
                      std::size_t restarts, std::size_t max_iter, double tol) {
  check_points(points, k_max);
  ElbowCurve out;
  ClusterModel previous;
  for (std::size_t k = 1; k <= k_max; ++k) {
    KMeansParams params{k, seed, max_iter, tol};
    ClusterModel best = fit_best(points, params, restarts);
    if (k > 1) {
      // split the worst-fit point off the (k-1) solution
      std::size_t far = 0;
      double far_d = -1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        double d = squared_distance(points[i], previous.centroids[previous.assignments[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      std::vector<FeatureVector> init = previous.centroids;
      init.push_back(points[far]);
      ClusterModel warm = fit_kmeans_from(points, std::move(init), params);
      if (warm.wcss < best.wcss) best = std::move(warm);
    }
    out.curve.push_back({k, best.wcss});
    previous = std::move(best);
  }
  out.suggested_k = 1;
  if (k_max >= 3) {
    double best_d2 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < out.curve.size(); ++i) {
      double d2 = out.curve[i - 1].wcss - 2 * out.curve[i].wcss + out.curve[i + 1].wcss;
      if (d2 > best_d2) {
        best_d2 = d2;
        out.suggested_k = out.curve[i].k;
      }
    }
  }
  return out;
}

std::string cluster_label(std::size_t index) {
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  return "C" + std::to_string(index);
}

std::size_t parse_cluster_label(const std::string& label) {
  std::string t = trim(label);
  if (t.size() == 1 && std::isalpha(static_cast<unsigned char>(t[0])))
    return static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(t[0])) - 'A');
  if (t.size() > 1 && t[0] == 'C' && std::all_of(t.begin() + 1, t.end(), ::isdigit)) return std::stoul(t.substr(1));
  if (!t.empty() && std::all_of(t.begin(), t.end(), ::isdigit)) return std::stoul(t);
  throw Error(Errc::parameter, "unknown cluster label '" + label + "'");
}

}  // namespace rulcast::analogs
