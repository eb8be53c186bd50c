#include "wedgelab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "wedgelab/errors.hpp"

namespace wedgelab {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / double(xs.size() - 1);
}

double mean_stderr(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::sqrt(sample_variance(xs) / double(xs.size()));
}

WilsonInterval wilson_interval(long successes, long trials, double z) {
  if (trials <= 0) throw ValidationError("wilson_interval: no trials");
  double n = double(trials);
  double p = double(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, center - half), std::min(1.0, center + half),
          std::sqrt(p * (1.0 - p) / n)};
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = double(a.size()), nb = double(b.size());
  while (i < a.size() && j < b.size()) {
    // Ties must advance both empirical distributions before measuring.
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  return d;
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw ValidationError("ks_critical: empty sample");
  double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

}  // namespace wedgelab
