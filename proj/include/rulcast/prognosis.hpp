#pragma once

// Per-cluster simple linear regression of response time on cumulative CPV
// with its validation statistics.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rulcast::prognosis {

struct RegressionModel {
  std::size_t cluster = 0;
  double slope = 0;      // ms per CPV unit
  double intercept = 0;  // ms
  std::size_t n = 0;
  double pearson_r = 0;
  double r_squared = 0;
  double adjusted_r_squared = 0;
  double slope_se = 0;
  double t_statistic = 0;
  double p_value = 1;
  std::vector<double> xs;
  std::vector<double> residuals;  // y - yhat, in input order
  double x_min = 0;
  double x_max = 0;
  std::vector<std::string> warnings;
};

/// Ordinary least squares via centered normal equations. Throws
/// Errc::insufficient_data for n < 3 and Errc::degenerate for constant x.
RegressionModel fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

double predict_rt(const RegressionModel& model, double cpv);
bool extrapolates(const RegressionModel& model, double cpv);

/// Throws Errc::degenerate when either variance is zero.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);
/// Two-sided P(|T| >= |t|) for Student-t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  std::size_t fold_count = 2;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1, then the first round(fraction * n) go to train.
Split train_test_split(std::size_t n, const SplitSpec& spec);

struct Observation {
  double cpv = 0;
  double rt_ms = 0;
};

struct FoldScores {
  std::vector<double> scores;
  double mean = 0;
};

/// Seeded partition into k near-equal folds; each fold is scored by its
/// out-of-fold R^2 against the fold's own mean.
FoldScores kfold_cv(const std::vector<Observation>& data, std::size_t k, std::uint64_t seed);

/// Contiguous fold index ranges of the seeded permutation (sizes differ by <= 1).
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k, std::uint64_t seed);

struct HoldoutResult {
  RegressionModel model;
  std::vector<std::size_t> test;
  std::vector<double> actual;
  std::vector<double> predicted;
  std::optional<double> r_squared;  // absent when the test targets are constant
};

HoldoutResult holdout(const std::vector<Observation>& data, const SplitSpec& spec);

}  // namespace rulcast::prognosis
