#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wedgelab/kernel.hpp"

using namespace wedgelab;

namespace {

SubKernel kernel2(double a, double b, double c, double d, const std::string& tag = "k") {
  MatrixXd w(2, 2);
  w << a, b, c, d;
  return SubKernel(FiniteStateSpace::indexed(tag + "s", 2),
                   FiniteStateSpace::indexed(tag + "t", 2), w);
}

// Q1 rows u:(0.5,0.0), v:(0.2,0.2); Q2 rows p:(0.3,0.4), q:(0.1,0.1).
ChainSequence example_chain() {
  FiniteStateSpace e0({"y0", "y1"});
  FiniteStateSpace e1({"u", "v"});
  FiniteStateSpace e2({"p", "q"});
  MatrixXd q1(2, 2), q2(2, 2);
  q1 << 0.5, 0.0, 0.2, 0.2;
  q2 << 0.3, 0.4, 0.1, 0.1;
  std::vector<SubKernel> ks;
  ks.emplace_back(e1, e0, q1);
  ks.emplace_back(e2, e1, q2);
  return ChainSequence(std::move(ks));
}

}  // namespace

TEST_CASE("apply: matrix action on functions") {
  SubKernel id = kernel2(1.0, 0.0, 0.0, 1.0);
  VectorXd f(2);
  f << 3.0, -1.0;
  VectorXd out = apply(id, f);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == -1.0);

  SubKernel k = kernel2(0.5, 0.3, 0.2, 0.6);
  VectorXd sums = apply(k, VectorXd::Ones(2));
  CHECK(sums[0] == doctest::Approx(0.8));
  CHECK(sums[1] == doctest::Approx(0.8));

  SubKernel k2 = kernel2(0.5, 0.0, 0.2, 0.2);
  VectorXd g(2);
  g << 2.0, 4.0;
  VectorXd out2 = apply(k2, g);
  CHECK(out2[0] == doctest::Approx(1.0));
  CHECK(out2[1] == doctest::Approx(1.2));

  VectorXd bad(3);
  bad << 1, 2, 3;
  CHECK_THROWS_AS(apply(k2, bad), DimensionError);
}

TEST_CASE("kernel validation") {
  MatrixXd neg(1, 2);
  neg << -0.2, 0.3;
  CHECK_THROWS_AS(SubKernel(FiniteStateSpace::indexed("a", 1), FiniteStateSpace::indexed("b", 2),
                            neg),
                  ValidationError);
  MatrixXd heavy(1, 2);
  heavy << 0.7, 0.6;
  CHECK_THROWS_AS(SubKernel(FiniteStateSpace::indexed("a", 1), FiniteStateSpace::indexed("b", 2),
                            heavy),
                  ValidationError);
  MatrixXd zero = MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(SubKernel(FiniteStateSpace::indexed("a", 2), FiniteStateSpace::indexed("b", 2),
                            zero),
                  ValidationError);
  // Ingestion clamps sub-tolerance excursions.
  MatrixXd tiny(1, 2);
  tiny << -1e-13, 0.5;
  SubKernel ok(FiniteStateSpace::indexed("a", 1), FiniteStateSpace::indexed("b", 2), tiny);
  CHECK(ok.weights()(0, 0) == 0.0);
  CHECK(ok.weights()(0, 1) == 0.5);
}

TEST_CASE("survival products") {
  SUBCASE("probability kernel conserves mass") {
    MatrixXd w(2, 2);
    w << 0.6, 0.4, 0.25, 0.75;
    std::vector<SubKernel> ks;
    ks.emplace_back(FiniteStateSpace::indexed("x", 2), FiniteStateSpace::indexed("y", 2), w);
    auto s = survival_products(ChainSequence(std::move(ks)));
    CHECK(s[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s[0][1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("rank-one mass decay") {
    VectorXd row(2);
    row << 0.3, 0.4;
    auto s = survival_products(oracles::rank_one_chain(row, 2));
    CHECK(s[0][0] == doctest::Approx(0.7));
    CHECK(s[0][1] == doctest::Approx(0.7));
    CHECK(s[1][0] == doctest::Approx(0.49));
  }
  SUBCASE("two-step arithmetic") {
    auto s = survival_products(example_chain());
    CHECK(s[0][0] == doctest::Approx(0.5));
    CHECK(s[0][1] == doctest::Approx(0.4));
    CHECK(s[1][0] == doctest::Approx(0.31));
    CHECK(s[1][1] == doctest::Approx(0.09));
  }
}

TEST_CASE("normalized kernel") {
  SUBCASE("probability chain is unchanged") {
    MatrixXd w(2, 2);
    w << 0.6, 0.4, 0.25, 0.75;
    std::vector<SubKernel> ks;
    ks.emplace_back(FiniteStateSpace::indexed("x", 2), FiniteStateSpace::indexed("y", 2), w);
    ChainSequence chain(std::move(ks));
    SubKernel p = normalized_kernel(chain, 1);
    CHECK((p.weights() - w).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("level one is plain row normalization") {
    std::vector<SubKernel> ks;
    ks.push_back(kernel2(0.2, 0.2, 0.3, 0.1));
    ChainSequence chain(std::move(ks));
    SubKernel p = normalized_kernel(chain, 1);
    CHECK(p.weights()(0, 0) == doctest::Approx(0.5));
    CHECK(p.weights()(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("definition arithmetic at level two") {
    SubKernel p = normalized_kernel(example_chain(), 2);
    CHECK(p.weights()(0, 0) == doctest::Approx(15.0 / 31.0));
    CHECK(p.weights()(0, 1) == doctest::Approx(16.0 / 31.0));
    CHECK(p.row_sums()[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p.row_sums()[1] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("dead state aborts with a diagnostic") {
    MatrixXd q1(2, 2);
    q1 << 0.0, 0.0, 0.5, 0.5;  // state u carries no mass, so s_1(u) = 0
    std::vector<SubKernel> ks;
    ks.emplace_back(FiniteStateSpace({"u", "v"}), FiniteStateSpace::indexed("y", 2), q1);
    ChainSequence chain(std::move(ks));
    try {
      normalized_kernel(chain, 1);
      CHECK(false);
    } catch (const DeadChainError& e) {
      CHECK(e.level == 1);
      CHECK(e.state == 0);
      CHECK(std::string(e.what()).find("dies at state u") != std::string::npos);
    }
  }
}

TEST_CASE("overlap and tv distance") {
  SubKernel full = kernel2(0.5, 0.5, 0.5, 0.5);
  CHECK(overlap(full, 0, 1) == doctest::Approx(1.0));
  SubKernel disjoint = kernel2(0.9, 0.0, 0.0, 0.9);
  CHECK(overlap(disjoint, 0, 1) == doctest::Approx(0.0));
  SubKernel mixed = kernel2(0.5, 0.3, 0.2, 0.6);
  CHECK(overlap(mixed, 0, 1) == doctest::Approx(0.5));

  VectorXd a(2), b(2);
  a << 0.7, 0.3;
  b << 0.4, 0.6;
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.3));
  VectorXd pa(2), pb(2);
  pa << 1.0, 0.0;
  pb << 0.0, 1.0;
  CHECK(tv_distance(pa, pb) == doctest::Approx(1.0));
}

TEST_CASE("one-step bound triple") {
  SUBCASE("identical-row probability kernel") {
    MatrixXd w(2, 2);
    w << 0.5, 0.5, 0.5, 0.5;
    std::vector<SubKernel> ks;
    ks.emplace_back(FiniteStateSpace::indexed("x", 2), FiniteStateSpace::indexed("y", 2), w);
    ChainSequence chain(std::move(ks));
    TvBoundTriple t = lemma_tv_bound_check(chain, 1, 0, 1);
    CHECK(t.lhs == doctest::Approx(0.0));
    CHECK(t.rhs1 == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("vacuous bound at zero overlap") {
    std::vector<SubKernel> ks;
    ks.push_back(kernel2(0.9, 0.0, 0.0, 0.9));
    ChainSequence chain(std::move(ks));
    TvBoundTriple t = lemma_tv_bound_check(chain, 1, 0, 1);
    CHECK(t.rhs1 == doctest::Approx(1.0));
    CHECK(t.lhs <= 1.0 + 1e-12);
  }
  SUBCASE("200 seeded chains against the subset-enumeration oracle") {
    for (int i = 0; i < 200; ++i) {
      RngStream szr = RngStream::derive(2024, "tv_sizes", std::uint64_t(i));
      std::vector<int> sizes = {2 + int(szr.below(5)), 2 + int(szr.below(5)),
                                2 + int(szr.below(5))};
      ChainSequence chain = oracles::random_chain_raw(1000 + std::uint64_t(i), sizes);
      int level = 1 + int(i % 2);
      SubKernel p = normalized_kernel(chain, level);
      for (int x = 0; x < chain.space(level).size(); ++x) {
        for (int y = 0; y < chain.space(level).size(); ++y) {
          TvBoundTriple t = lemma_tv_bound_check(chain, level, x, y);
          double oracle = oracles::tv_subsets(VectorXd(p.weights().row(x).transpose()),
                                              VectorXd(p.weights().row(y).transpose()));
          REQUIRE(std::abs(t.lhs - oracle) <= 1e-12);
          REQUIRE(t.lhs <= t.rhs1 + 1e-12);
          REQUIRE(t.rhs1 <= t.rhs2 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("condition checks") {
  VectorXd row(2);
  row << 0.3, 0.4;
  ChainSequence rank_one = oracles::rank_one_chain(row, 3);
  CHECK(condition_c0(rank_one, 1) == doctest::Approx(1.0));
  CHECK(condition_c0(rank_one, 3) == doctest::Approx(1.0));
  CHECK(condition_eps0(rank_one) == doctest::Approx(0.7));

  CHECK(condition_c0(example_chain(), 2) == doctest::Approx(0.09 / 0.31));

  std::vector<SubKernel> ks;
  ks.push_back(kernel2(0.9, 0.0, 0.0, 0.9));
  CHECK(condition_eps0(ChainSequence(std::move(ks))) == doctest::Approx(0.0));

  SUBCASE("exhaustive enumeration oracle") {
    for (int i = 0; i < 25; ++i) {
      ChainSequence chain = oracles::random_chain_raw(77 + std::uint64_t(i), {3, 3, 3, 3});
      CHECK(condition_eps0(chain) ==
            doctest::Approx(oracles::min_overlap_enumeration(chain)).epsilon(1e-14));
    }
  }
}

TEST_CASE("backward ratio operator") {
  SUBCASE("constants are fixed") {
    ChainSequence chain = oracles::random_chain_raw(5, {3, 4, 3, 2});
    VectorXd c = VectorXd::Constant(3, 2.5);
    for (int k = 1; k <= 3; ++k) {
      VectorXd t = tk_apply(chain, k, c);
      for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(2.5));
    }
  }
  SUBCASE("rank-one closed form") {
    VectorXd row(2);
    row << 0.3, 0.4;
    ChainSequence chain = oracles::rank_one_chain(row, 3);
    VectorXd f(2);
    f << 2.0, 6.0;
    for (int k = 1; k <= 3; ++k) {
      VectorXd t = tk_apply(chain, k, f);
      CHECK(t[0] == doctest::Approx(30.0 / 7.0));
      CHECK(t[1] == doctest::Approx(30.0 / 7.0));
    }
  }
  SUBCASE("matches iterated normalized kernels") {
    for (int i = 0; i < 20; ++i) {
      ChainSequence chain = oracles::random_chain_raw(400 + std::uint64_t(i), {4, 4, 4, 4});
      RngStream frng = RngStream::derive(9, "f", std::uint64_t(i));
      VectorXd f(4);
      for (int j = 0; j < 4; ++j) f[j] = frng.uniform(-2.0, 2.0);
      VectorXd via_ratio = tk_apply(chain, 3, f);
      VectorXd via_normalized = f;
      for (int l = 1; l <= 3; ++l)
        via_normalized = apply(normalized_kernel(chain, l), via_normalized);
      CHECK((via_ratio - via_normalized).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(via_ratio.maxCoeff() <= f.maxCoeff() + 1e-12);
      CHECK(via_ratio.minCoeff() >= f.minCoeff() - 1e-12);
    }
  }
}

TEST_CASE("entry-law ratio") {
  ChainSequence chain = oracles::random_chain_raw(12, {3, 3, 3});
  VectorXd f(3);
  f << 1.0, -0.5, 2.0;
  VectorXd t = tk_apply(chain, 2, f);
  for (int x = 0; x < 3; ++x)
    CHECK(ergodic_ratio(chain, 2, f, MeasureVec::point_mass(chain.space(2), x)) == t[x]);
  CHECK(ergodic_ratio(chain, 2, VectorXd::Ones(3), MeasureVec::uniform(chain.space(2))) ==
        doctest::Approx(1.0).epsilon(1e-14));

  VectorXd row(2);
  row << 0.3, 0.4;
  ChainSequence rank_one = oracles::rank_one_chain(row, 2);
  VectorXd g(2);
  g << 2.0, 6.0;
  CHECK(ergodic_ratio(rank_one, 2, g, MeasureVec::uniform(rank_one.space(2))) ==
        doctest::Approx(30.0 / 7.0));

  SUBCASE("dead entry law") {
    MatrixXd q(2, 2);
    q << 0.0, 0.0, 0.5, 0.5;
    std::vector<SubKernel> ks;
    ks.emplace_back(FiniteStateSpace::indexed("x", 2), FiniteStateSpace::indexed("y", 2), q);
    ChainSequence dead(std::move(ks));
    CHECK_THROWS_AS(
        ergodic_ratio(dead, 1, VectorXd::Ones(2), MeasureVec::point_mass(dead.space(1), 0)),
        DeadChainError);
  }
}

TEST_CASE("reverse limit extraction") {
  SUBCASE("rank-one chain converges at once") {
    VectorXd row(2);
    row << 0.3, 0.4;
    ChainSequence chain = oracles::rank_one_chain(row, 4);
    VectorXd f(2);
    f << 2.0, 6.0;
    ErgodicLimit lim = ergodic_limit(chain, f, 1e-12);
    CHECK(lim.value == doctest::Approx(30.0 / 7.0).epsilon(1e-14));
    CHECK(lim.k_used == 1);
  }
  SUBCASE("unit function is exact") {
    ChainSequence chain = random_chain({{4, 4, 4, 4, 4}, 0.4, 0.3, 99});
    ErgodicLimit lim = ergodic_limit(chain, VectorXd::Ones(4), 0.0);
    CHECK(lim.value == 1.0);
    CHECK(lim.certified_error == 0.0);
    CHECK(lim.k_used == 1);
  }
  SUBCASE("violated overlap condition is refused with a witness") {
    std::vector<SubKernel> ks;
    ks.push_back(kernel2(0.9, 0.0, 0.0, 0.9));
    ChainSequence chain(std::move(ks));
    try {
      ergodic_limit(chain, VectorXd::Ones(2), 1e-3);
      CHECK(false);
    } catch (const ConditionViolationError& e) {
      CHECK(e.level == 1);
      CHECK(e.x == 0);
      CHECK(e.x_tilde == 1);
    }
  }
  SUBCASE("horizon exhaustion carries the bracket") {
    ChainSequence chain = random_chain({{5, 5, 5}, 0.3, 0.2, 7});
    VectorXd f(5);
    f << 5.0, -3.0, 1.0, 0.0, 2.0;
    try {
      ergodic_limit(chain, f, 0.0);
      CHECK(false);
    } catch (const HorizonExhaustedError& e) {
      CHECK(e.k == 2);
      CHECK(e.lo <= e.hi);
    }
  }
  SUBCASE("spread is nonincreasing in depth") {
    ChainSequence chain = random_chain({{6, 6, 6, 6, 6, 6, 6}, 0.3, 0.2, 21});
    VectorXd f(6);
    RngStream frng(3);
    for (int j = 0; j < 6; ++j) f[j] = frng.uniform(-1.0, 1.0);
    double prev = 2.0 * f.cwiseAbs().maxCoeff();
    for (int k = 1; k <= chain.length(); ++k) {
      VectorXd t = tk_apply(chain, k, f);
      double spread = t.maxCoeff() - t.minCoeff();
      CHECK(spread <= prev + 1e-12);
      prev = spread;
    }
  }
}

TEST_CASE("measure pushforward and contraction certificate") {
  ChainSequence chain = random_chain({{4, 4, 4, 4}, 0.35, 0.25, 3});
  ContractionCertificate cert = certify_contraction(chain);
  CHECK(cert.c0 >= 0.35);
  CHECK(cert.eps0 >= 0.25);
  CHECK(cert.rate == doctest::Approx(1.0 - cert.eps0 * cert.c0));
  CHECK(cert.bound == doctest::Approx(std::pow(cert.rate, chain.length())));

  MeasureVec mu = MeasureVec::point_mass(chain.space(3), 0);
  MeasureVec nu = MeasureVec::point_mass(chain.space(3), 2);
  for (int l = 3; l >= 1; --l) {
    mu = push_measure(mu, normalized_kernel(chain, l));
    nu = push_measure(nu, normalized_kernel(chain, l));
  }
  CHECK(mu.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tv_distance(mu, nu) <= cert.bound + 1e-12);
}

TEST_CASE("seeded chain generator") {
  RandomChainSpec spec;
  spec.sizes = {3, 3, 3};
  spec.mass_floor = 0.3;
  spec.overlap_floor = 0.2;
  spec.seed = 1;
  ChainSequence a = random_chain(spec);
  ChainSequence b = random_chain(spec);
  for (int l = 1; l <= a.length(); ++l)
    CHECK((a.kernel(l).weights().array() == b.kernel(l).weights().array()).all());
  CHECK(condition_eps0(a) >= spec.overlap_floor);
  for (int k = 1; k <= a.length(); ++k) CHECK(condition_c0(a, k) >= spec.mass_floor);

  SUBCASE("feasibility boundary") {
    RandomChainSpec hard;
    hard.sizes = {2, 2};
    hard.mass_floor = 0.999;
    hard.overlap_floor = 0.999;
    hard.seed = 5;
    hard.max_attempts = 16;
    try {
      ChainSequence c = random_chain(hard);
      CHECK(condition_eps0(c) >= 0.999);  // near rank one
    } catch (const RejectionBudgetError&) {
      CHECK(true);  // rejection is an acceptable outcome here
    }
  }
  SUBCASE("bad floors are refused") {
    RandomChainSpec bad;
    bad.sizes = {2, 2};
    bad.mass_floor = 0.0;
    CHECK_THROWS_AS(random_chain(bad), ValidationError);
  }
}
