#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wedgelab/rng.hpp"
#include "wedgelab/wedge.hpp"

using namespace wedgelab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("reflection angles and their sign convention") {
  double zeta = kPi / 2.0;
  SUBCASE("normal reflection") {
    auto [z1, z2] = reflection_angles(zeta, Vector2d(0, 1), Vector2d(1, 0));
    CHECK(z1 == doctest::Approx(0.0));
    CHECK(z2 == doctest::Approx(0.0));
  }
  SUBCASE("tilt toward the tip is positive") {
    WedgeSpec s = WedgeSpec::from_angles(zeta, kPi / 6.0, 0.0);
    auto [z1, z2] = reflection_angles(zeta, s.g1, s.g2);
    CHECK(z1 == doctest::Approx(kPi / 6.0));
    CHECK(z2 == doctest::Approx(0.0));
  }
  SUBCASE("tilt away from the tip is negative") {
    WedgeSpec s = WedgeSpec::from_angles(zeta, -kPi / 6.0, 0.0);
    CHECK(s.zeta1 == doctest::Approx(-kPi / 6.0));
  }
  SUBCASE("tangential or outward vectors are refused") {
    CHECK_THROWS_AS(reflection_angles(zeta, Vector2d(1, 0), Vector2d(1, 0)), ValidationError);
    CHECK_THROWS_AS(reflection_angles(zeta, Vector2d(0, -1), Vector2d(1, 0)), ValidationError);
  }
}

TEST_CASE("corner exponent") {
  CHECK(WedgeSpec::from_angles(kPi / 2, kPi / 6, kPi / 12).alpha == doctest::Approx(0.5));
  CHECK(WedgeSpec::from_angles(kPi / 2, 0.0, 0.0).alpha == 0.0);
  CHECK(WedgeSpec::from_angles(kPi / 2, -kPi / 8, -kPi / 8).alpha == doctest::Approx(-0.5));
  CHECK(WedgeSpec::from_angles(kPi / 2, 0.0, 0.0).regime == Regime::alpha_zero);
  CHECK(WedgeSpec::from_angles(kPi / 2, kPi / 6, kPi / 12).regime == Regime::alpha_positive);
  WedgeSpec hot = WedgeSpec::from_angles(0.5, 0.3, 0.3);
  CHECK(hot.alpha >= 1.0);
  CHECK(hot.alpha_ge_one);
}

TEST_CASE("separating vector") {
  SUBCASE("identical directions") {
    WedgeSpec s = WedgeSpec::from_angles(kPi / 2, 0.0, 0.0);
    s.g2 = s.g1;  // degenerate direction cone
    EVector ev = find_e_vector(s);
    CHECK((ev.e - s.g1).norm() < 1e-12);
    CHECK(ev.c_e == doctest::Approx(1.0));
  }
  SUBCASE("perpendicular directions") {
    WedgeSpec s = WedgeSpec::from_angles(kPi / 2, 0.0, 0.0);  // g1=(0,1), g2=(1,0)
    EVector ev = find_e_vector(s);
    CHECK(ev.c_e == doctest::Approx(std::sqrt(0.5)));
  }
  SUBCASE("opposed directions have no separator") {
    WedgeSpec s = WedgeSpec::from_angles(kPi / 2, 0.0, 0.0);
    s.g2 = -s.g1;
    CHECK_THROWS_AS(find_e_vector(s), ValidationError);
  }
  SUBCASE("no grid direction beats the bisector") {
    WedgeSpec s = WedgeSpec::from_angles(3 * kPi / 4, 3 * kPi / 16, 3 * kPi / 16);
    EVector ev = find_e_vector(s);
    double best = -1.0;
    for (int i = 0; i < 10000; ++i) {
      double a = 2.0 * kPi * i / 10000.0;
      Vector2d e(std::cos(a), std::sin(a));
      best = std::max(best, std::min(e.dot(s.g1), e.dot(s.g2)));
    }
    CHECK(ev.c_e >= best - 1e-7);  // grid spacing limits the challenger
    CHECK(ev.c_e == doctest::Approx(std::min(ev.e.dot(s.g1), ev.e.dot(s.g2))).epsilon(1e-12));
  }
}

TEST_CASE("direction cone meets the sector") {
  double zeta = kPi / 2.0;
  SUBCASE("normal reflection points inside") {
    CHECK(check_condition_G3(WedgeSpec::from_angles(zeta, 0.0, 0.0)));
  }
  SUBCASE("outward tangential directions miss") {
    CHECK_FALSE(cone_meets_sector(zeta, Vector2d(-1.0, 0.0), Vector2d(0.0, -1.0)));
  }
  SUBCASE("one interior generator suffices") {
    Vector2d inside(std::cos(zeta / 3), std::sin(zeta / 3));
    CHECK(cone_meets_sector(zeta, inside, Vector2d(-1.0, 0.0)));
  }
  SUBCASE("restart direction is the overlap bisector") {
    WedgeSpec s = WedgeSpec::from_angles(zeta, 0.0, 0.0);
    Vector2d g0 = restart_direction(s);
    CHECK(g0.norm() == doctest::Approx(1.0));
    double ang = std::atan2(g0.y(), g0.x());
    CHECK(ang > 0.0);
    CHECK(ang < zeta);
  }
}

TEST_CASE("radial tilt perturbation") {
  WedgeSpec base = WedgeSpec::from_angles(kPi / 2, 0.0, 0.0);
  SUBCASE("zero tilt is the identity") {
    WedgeSpec same = perturbed_spec(base, 0.0);
    CHECK(same.alpha == base.alpha);
    CHECK((same.g1 - base.g1).norm() == 0.0);
  }
  SUBCASE("normal wedge tilts toward the tip") {
    WedgeSpec tilted = perturbed_spec(base, 0.1);
    CHECK(tilted.alpha > 0.0);
    CHECK(tilted.g1.norm() == doctest::Approx(1.0));
    CHECK(tilted.g2.norm() == doctest::Approx(1.0));
  }
  SUBCASE("sweep is strictly increasing") {
    for (int i = 0; i < 10; ++i) {
      RngStream rng = RngStream::derive(17, "tilt", std::uint64_t(i));
      WedgeSpec s = WedgeSpec::from_angles(rng.uniform(0.4 * kPi, 1.1 * kPi),
                                           rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
      double prev = s.alpha;
      for (double eps : {0.05, 0.1, 0.2}) {
        double cur = perturbed_spec(s, eps).alpha;
        CHECK(cur > prev);
        prev = cur;
      }
    }
  }
}

TEST_CASE("wrapped angle keeps the sector away from the cut") {
  double zeta = 1.9 * kPi;
  CHECK(wrapped_angle(zeta, Vector2d(1.0, 0.0)) == doctest::Approx(0.0));
  CHECK(wrapped_angle(zeta, polar_point(2.0, zeta)) == doctest::Approx(zeta));
  CHECK(wrapped_angle(zeta, polar_point(1.0, 0.5 * zeta)) == doctest::Approx(0.5 * zeta));
}
