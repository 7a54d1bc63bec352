#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerical code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

// Exact fraction over 64-bit integers (small test fixtures only).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den < 0) num = -num, den = -den;
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

using Point = std::vector<double>;

inline double sq(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

// Minimum within-cluster sum of squares over every assignment of the points
// to exactly k non-empty groups (k^n enumeration; n <= 8, k <= 3).
inline double brute_force_wcss(const std::vector<Point>& pts, std::size_t k) {
  const std::size_t n = pts.size(), dim = pts.front().size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> label(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) label[i] = c % k, c /= k;
    std::vector<Point> sum(k, Point(dim, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[label[i]];
      for (std::size_t d = 0; d < dim; ++d) sum[label[i]][d] += pts[i][d];
    }
    if (std::find(count.begin(), count.end(), 0u) != count.end()) continue;
    for (std::size_t g = 0; g < k; ++g)
      for (auto& v : sum[g]) v /= static_cast<double>(count[g]);
    double j = 0;
    for (std::size_t i = 0; i < n; ++i) j += sq(pts[i], sum[label[i]]);
    best = std::min(best, j);
  }
  return best;
}

struct Ols {
  long double slope, intercept, r2, adj_r2, t;
  long double dof;
};

// Raw (uncentered) normal equations [n Sx; Sx Sxx][b; m] = [Sy; Sxy] in long
// double, solved by Cramer's rule.
inline Ols normal_equations(const std::vector<double>& xs, const std::vector<double>& ys) {
  long double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += static_cast<long double>(xs[i]) * xs[i];
    sxy += static_cast<long double>(xs[i]) * ys[i];
  }
  long double det = n * sxx - sx * sx;
  Ols o{};
  o.slope = (n * sxy - sx * sy) / det;
  o.intercept = (sxx * sy - sx * sxy) / det;
  long double ybar = sy / n, ssr = 0, sst = 0, xbar = sx / n, sxxc = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    long double e = ys[i] - (o.slope * xs[i] + o.intercept);
    ssr += e * e;
    sst += (ys[i] - ybar) * (ys[i] - ybar);
    sxxc += (xs[i] - xbar) * (xs[i] - xbar);
  }
  o.dof = n - 2;
  o.r2 = 1 - ssr / sst;
  o.adj_r2 = 1 - (1 - o.r2) * (n - 1) / (n - 2);
  o.t = o.slope / (std::sqrt(ssr / o.dof) / std::sqrt(sxxc));
  return o;
}

// Two-sided Student-t tail by adaptive Simpson integration of the density.
inline long double t_density(long double x, long double nu) {
  long double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * 3.14159265358979323846L);
  return c * std::pow(1 + x * x / nu, -(nu + 1) / 2);
}

inline long double simpson(long double a, long double b, long double nu, long double fa, long double fm,
                           long double fb, long double whole, long double eps, int depth) {
  long double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  long double flm = t_density(lm, nu), frm = t_density(rm, nu);
  long double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
  return simpson(a, m, nu, fa, flm, fm, left, eps / 2, depth - 1) +
         simpson(m, b, nu, fm, frm, fb, right, eps / 2, depth - 1);
}

inline double t_two_sided(double t, double nu) {
  long double a = 0, b = std::fabs(t);
  if (b == 0) return 1.0;
  long double fa = t_density(a, nu), fb = t_density(b, nu), fm = t_density(b / 2, nu);
  long double whole = b / 6 * (fa + 4 * fm + fb);
  long double inner = simpson(a, b, nu, fa, fm, fb, whole, 1e-14L, 60);
  return static_cast<double>(1 - 2 * inner);
}

}  // namespace oracle
