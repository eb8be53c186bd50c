#include <cmath>
#include <vector>

#include "doctest.h"
#include "wedgelab/errors.hpp"
#include "wedgelab/rng.hpp"
#include "wedgelab/stats.hpp"

using namespace wedgelab;

TEST_CASE("replicate streams are independent of derivation order") {
  RngStream a = RngStream::derive(42, "alpha", 3);
  RngStream b = RngStream::derive(42, "alpha", 3);
  for (int i = 0; i < 8; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c = RngStream::derive(42, "alpha", 4);
  RngStream d = RngStream::derive(42, "beta", 3);
  CHECK(RngStream::derive(42, "alpha", 3).next_u64() != c.next_u64());
  CHECK(RngStream::derive(42, "alpha", 3).next_u64() != d.next_u64());
}

TEST_CASE("uniforms and normals look sane") {
  RngStream rng(7);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sumsq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.03));

  double zsum = 0.0, zsq = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    double z0, z1;
    rng.normal_pair(z0, z1);
    zsum += z0 + z1;
    zsq += z0 * z0 + z1 * z1;
  }
  CHECK(zsum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(zsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("wilson interval") {
  WilsonInterval w = wilson_interval(90, 100);
  CHECK(w.p_hat == doctest::Approx(0.9));
  CHECK(w.lo < 0.9);
  CHECK(w.hi > 0.9);
  CHECK(w.lo > 0.8);
  CHECK(w.hi < 0.97);
  CHECK_THROWS_AS(wilson_interval(0, 0), ValidationError);
}

TEST_CASE("two-sample KS statistic") {
  std::vector<double> a = {0.1, 0.2, 0.3, 0.4};
  std::vector<double> b = {0.1, 0.2, 0.3, 0.4};
  CHECK(ks_statistic(a, b) == doctest::Approx(0.0));
  std::vector<double> c = {1.1, 1.2, 1.3, 1.4};
  CHECK(ks_statistic(a, c) == doctest::Approx(1.0));
  std::vector<double> d = {0.05, 0.15, 0.35, 0.45};
  CHECK(ks_statistic(a, d) <= 0.25 + 1e-12);
  CHECK(ks_critical(0.01, 10000, 10000) == doctest::Approx(1.6276 * std::sqrt(2.0 / 10000.0))
                                               .epsilon(1e-3));
}

TEST_CASE("mean and stderr helpers") {
  std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  CHECK(mean(xs) == doctest::Approx(2.5));
  CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0));
  CHECK(mean_stderr(xs) == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}
