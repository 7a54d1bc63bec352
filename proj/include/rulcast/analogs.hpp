#pragma once

// Analogous-release clustering: seeded k-means++ / Lloyd, the WCSS elbow
// curve, and nearest-centroid assignment of future releases.

#include <cstdint>
#include <string>
#include <vector>

namespace rulcast::analogs {

using FeatureVector = std::vector<double>;

/// Per-dimension z-score fitted on historical releases only.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> stddev);
  /// Population mean and standard deviation; throws Errc::degenerate when a
  /// dimension has zero spread.
  static Standardizer fit(const std::vector<FeatureVector>& points);

  FeatureVector apply(const FeatureVector& raw) const;
  std::vector<FeatureVector> apply(const std::vector<FeatureVector>& raw) const;

  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& stddev() const noexcept { return stddev_; }

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

struct KMeansParams {
  std::size_t k = 2;
  std::uint64_t seed = 42;
  std::size_t max_iter = 300;
  double tol = 1e-10;
};

struct ClusterModel {
  std::size_t k = 0;
  std::vector<FeatureVector> centroids;
  std::vector<std::size_t> assignments;  // one per input point
  double wcss = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  // J after each assignment step; non-increasing.
  std::vector<double> wcss_trace;
};

/// One seeded k-means++ + Lloyd run. Cluster indices are canonicalized so
/// that cluster 0 holds the first point, the next new cluster seen in point
/// order is 1, and so on.
ClusterModel fit_kmeans(const std::vector<FeatureVector>& points, const KMeansParams& params);

/// Lloyd iterations from explicit starting centroids.
ClusterModel fit_kmeans_from(const std::vector<FeatureVector>& points, std::vector<FeatureVector> initial,
                             const KMeansParams& params);

/// Best (minimum J) of `restarts` seeded runs; earlier seeds win ties.
ClusterModel fit_best(const std::vector<FeatureVector>& points, const KMeansParams& params, std::size_t restarts);

struct WcssPoint {
  std::size_t k = 0;
  double wcss = 0;
};

struct ElbowCurve {
  std::vector<WcssPoint> curve;
  std::size_t suggested_k = 1;
};

/// Best-of-restarts J for k = 1..k_max, plus a warm start per k seeded from
/// the (k-1) solution and its worst-fit point, so the curve is non-increasing.
/// suggested_k maximizes the second difference over interior k.
ElbowCurve wcss_curve(const std::vector<FeatureVector>& points, std::size_t k_max, std::uint64_t seed,
                      std::size_t restarts = 10, std::size_t max_iter = 300, double tol = 1e-10);

/// Nearest centroid by squared Euclidean distance; ties to the lower index.
std::size_t assign(const ClusterModel& model, const FeatureVector& point);
std::size_t nearest(const std::vector<FeatureVector>& centroids, const FeatureVector& point);

double squared_distance(const FeatureVector& a, const FeatureVector& b);
double wcss(const std::vector<FeatureVector>& points, const std::vector<FeatureVector>& centroids,
            const std::vector<std::size_t>& assignments);

/// "A", "B", ... for cluster indices.
std::string cluster_label(std::size_t index);
/// Inverse of cluster_label; also accepts a decimal index.
std::size_t parse_cluster_label(const std::string& label);

}  // namespace rulcast::analogs
