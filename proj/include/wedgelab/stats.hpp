#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wedgelab {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
// Standard error of the sample mean.
double mean_stderr(std::span<const double> xs);

struct WilsonInterval {
  double p_hat;
  double lo;
  double hi;
  double se;  // binomial sqrt(p(1-p)/n)
};

// Wilson score interval for a binomial proportion (z = 1.96 by default).
WilsonInterval wilson_interval(long successes, long trials, double z = 1.96);

// Two-sample Kolmogorov-Smirnov statistic, sup |F1 - F2|. Inputs need not be sorted.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Asymptotic two-sample critical value c(alpha) * sqrt((n+m)/(n*m)).
double ks_critical(double alpha, std::size_t n, std::size_t m);

}  // namespace wedgelab
