#include "rulcast/prognosis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"

namespace rulcast::prognosis {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Continued fraction for I_x(a,b), modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw Error(Errc::parameter, "incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw Error(Errc::parameter, "incomplete beta needs a, b > 0");
  if (!(x >= 0 && x <= 1)) throw Error(Errc::parameter, "incomplete beta needs 0 <= x <= 1");
  if (x == 0) return 0;
  if (x == 1) return 1;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0)) throw Error(Errc::parameter, "degrees of freedom must be > 0");
  if (std::isnan(t)) throw Error(Errc::parameter, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::min(1.0, incomplete_beta(dof / 2.0, 0.5, x));
}

RegressionModel fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error(Errc::parameter, "xs and ys differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw Error(Errc::insufficient_data, "insufficient data: regression needs n >= 3, got " + std::to_string(n));

  const double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw Error(Errc::degenerate, "degenerate predictor: all CPV values are equal");

  RegressionModel m;
  m.n = n;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  m.xs = xs;
  m.x_min = *std::min_element(xs.begin(), xs.end());
  m.x_max = *std::max_element(xs.begin(), xs.end());
  m.residuals.resize(n);
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m.residuals[i] = ys[i] - (m.slope * xs[i] + m.intercept);
    ssr += m.residuals[i] * m.residuals[i];
  }
  const double dof = static_cast<double>(n - 2);

  if (syy == 0) {
    // Constant target: the fitted line is flat and exact.
    m.pearson_r = std::numeric_limits<double>::quiet_NaN();
    m.r_squared = 1.0;
    m.adjusted_r_squared = 1.0;
    m.slope_se = 0;
    m.t_statistic = std::numeric_limits<double>::quiet_NaN();
    m.p_value = 1.0;
    m.warnings.push_back("degenerate target: response time is constant, R^2 set to 1");
    return m;
  }

  m.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  m.r_squared = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
  m.adjusted_r_squared = 1.0 - (1.0 - m.r_squared) * static_cast<double>(n - 1) / dof;
  m.slope_se = std::sqrt(ssr / dof) / std::sqrt(sxx);
  if (m.slope_se == 0) {
    m.t_statistic = m.slope > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    m.p_value = 0.0;
  } else {
    m.t_statistic = m.slope / m.slope_se;
    m.p_value = student_t_two_sided(m.t_statistic, dof);
  }
  return m;
}

double predict_rt(const RegressionModel& model, double cpv) { return model.slope * cpv + model.intercept; }

bool extrapolates(const RegressionModel& model, double cpv) { return cpv < model.x_min || cpv > model.x_max; }

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error(Errc::parameter, "xs and ys differ in length");
  if (xs.size() < 2) throw Error(Errc::insufficient_data, "correlation needs n >= 2");
  const double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw Error(Errc::degenerate, "correlation undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Split train_test_split(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0 && spec.train_fraction < 1))
    throw Error(Errc::parameter, "train fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw Error(Errc::insufficient_data, "insufficient data: " + std::to_string(n) +
                                             " points cannot give non-empty train and test sets");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, 0x5111));
  shuffle(order, rng);
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::parameter, "fold count must be >= 2");
  if (k > n) throw Error(Errc::insufficient_data, "insufficient data: more folds than points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0xF01D));
  shuffle(order, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t at = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(at),
                    order.begin() + static_cast<std::ptrdiff_t>(at + size));
    at += size;
  }
  return folds;
}

FoldScores kfold_cv(const std::vector<Observation>& data, std::size_t k, std::uint64_t seed) {
  auto folds = kfold_partition(data.size(), k, seed);
  FoldScores out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<bool> held(data.size(), false);
    for (std::size_t i : folds[f]) held[i] = true;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (!held[i]) {
        xs.push_back(data[i].cpv);
        ys.push_back(data[i].rt_ms);
      }
    const std::string name = "fold " + std::to_string(f + 1);
    if (xs.size() < 3)
      throw Error(Errc::insufficient_data, "insufficient data: " + name + " leaves " + std::to_string(xs.size()) +
                                               " training points (need 3)");
    RegressionModel m;
    try {
      m = fit_line(xs, ys);
    } catch (const Error& e) {
      throw Error(e.code(), name + ": " + e.what());
    }
    double y_mean = 0;
    for (std::size_t i : folds[f]) y_mean += data[i].rt_ms;
    y_mean /= static_cast<double>(folds[f].size());
    double sse = 0, sst = 0;
    for (std::size_t i : folds[f]) {
      const double e = data[i].rt_ms - predict_rt(m, data[i].cpv);
      sse += e * e;
      sst += (data[i].rt_ms - y_mean) * (data[i].rt_ms - y_mean);
    }
    if (sst == 0) throw Error(Errc::degenerate, "degenerate target: " + name + " has constant response time");
    out.scores.push_back(1.0 - sse / sst);
  }
  out.mean = std::accumulate(out.scores.begin(), out.scores.end(), 0.0) / static_cast<double>(out.scores.size());
  return out;
}

HoldoutResult holdout(const std::vector<Observation>& data, const SplitSpec& spec) {
  Split s = train_test_split(data.size(), spec);
  std::vector<double> xs, ys;
  for (std::size_t i : s.train) {
    xs.push_back(data[i].cpv);
    ys.push_back(data[i].rt_ms);
  }
  HoldoutResult out;
  out.model = fit_line(xs, ys);
  out.test = s.test;
  double y_mean = 0;
  for (std::size_t i : s.test) {
    out.actual.push_back(data[i].rt_ms);
    out.predicted.push_back(predict_rt(out.model, data[i].cpv));
    y_mean += data[i].rt_ms;
  }
  y_mean /= static_cast<double>(s.test.size());
  double sse = 0, sst = 0;
  for (std::size_t j = 0; j < out.actual.size(); ++j) {
    sse += (out.actual[j] - out.predicted[j]) * (out.actual[j] - out.predicted[j]);
    sst += (out.actual[j] - y_mean) * (out.actual[j] - y_mean);
  }
  if (sst > 0) out.r_squared = 1.0 - sse / sst;
  return out;
}

}  // namespace rulcast::prognosis
