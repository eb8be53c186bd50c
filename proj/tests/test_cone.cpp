#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wedgelab/cone.hpp"
#include "wedgelab/rng.hpp"

using namespace wedgelab;

namespace {
constexpr double kPi = std::numbers::pi;

WedgeSpec positive_spec() { return WedgeSpec::from_angles(kPi / 2, kPi / 6, kPi / 12); }
WedgeSpec negative_spec() { return WedgeSpec::from_angles(kPi / 2, -kPi / 8, -kPi / 8); }
WedgeSpec zero_spec() { return WedgeSpec::from_angles(2 * kPi / 3, kPi / 7, -kPi / 7); }
}  // namespace

TEST_CASE("gauge values") {
  ConeFunctionSet cone(positive_spec());
  CHECK(cone.psi(kPi / 3) == doctest::Approx(1.0).epsilon(1e-14));  // cos(pi/6 - pi/6)
  CHECK(cone.Psi(4.0, kPi / 3) == doctest::Approx(2.0).epsilon(1e-14));

  ConeFunctionSet zero(zero_spec());
  CHECK(zero.psi(0.0) == 0.0);
  CHECK(zero.Psi(0.37, 0.0) == doctest::Approx(-std::log(0.37)));

  ConeFunctionSet neg(negative_spec());
  // Distance transform vanishes toward the tip when the exponent is negative.
  double near = neg.Phi(1e-10, 0.3);
  double far = neg.Phi(1e-2, 0.3);
  CHECK(near > 0.0);
  CHECK(near < far);
  CHECK(near == doctest::Approx(std::sqrt(1e-10) / neg.psi(0.3)).epsilon(1e-12));

  CHECK_THROWS_AS(cone.Psi(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(cone.Psi(-1.0, 0.1), DomainError);
}

TEST_CASE("analytic gradients match central differences") {
  for (const WedgeSpec& s : {positive_spec(), negative_spec(), zero_spec()}) {
    ConeFunctionSet cone(s);
    ScalarField gauge = cone.Psi_field();
    ScalarField dist = cone.Phi_field();
    RngStream rng(11);
    for (int i = 0; i < 40; ++i) {
      double r = rng.uniform(0.2, 3.0);
      double z = rng.uniform(0.1, 0.9) * s.zeta;
      Vector2d p = polar_point(r, z);
      double h = 1e-6 * r;
      Vector2d g_fd = gradient_fd(gauge, p, h);
      CHECK((cone.Psi_grad(p) - g_fd).norm() <= 1e-6 * (1.0 + cone.Psi_grad(p).norm()));
      Vector2d p_fd = gradient_fd(dist, p, h);
      CHECK((cone.Phi_grad(p) - p_fd).norm() <= 1e-6 * (1.0 + cone.Phi_grad(p).norm()));
    }
  }
}

TEST_CASE("homogeneity of the gauge") {
  ConeFunctionSet cone(positive_spec());
  ConeFunctionSet zero(zero_spec());
  RngStream rng(5);
  for (int i = 0; i < 50; ++i) {
    double r = rng.uniform(0.1, 2.0);
    double z = rng.uniform(0.0, 1.0) * positive_spec().zeta;
    double c = rng.uniform(0.2, 5.0);
    double lhs = cone.Psi(c * r, z);
    double rhs = std::pow(c, 0.5) * cone.Psi(r, z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    double z0 = rng.uniform(0.0, 1.0) * zero_spec().zeta;
    CHECK(zero.Psi(c * r, z0) == doctest::Approx(zero.Psi(r, z0) - std::log(c)).epsilon(1e-12));
  }
}

TEST_CASE("five-point Laplacian") {
  WedgeSpec s = positive_spec();
  SUBCASE("exact on quadratics") {
    ScalarField quad{"r2", [](const Vector2d& p) { return p.squaredNorm(); }, nullptr, nullptr};
    double lap = laplacian_fd(quad, s, polar_point(1.0, 0.5 * s.zeta), 1e-3);
    CHECK(lap == doctest::Approx(4.0).epsilon(1e-6));
  }
  SUBCASE("gauge residual decays at second order") {
    ConeFunctionSet cone(s);
    ScalarField gauge = cone.Psi_field();
    Vector2d p = polar_point(1.3, 0.4 * s.zeta);
    double l1 = std::abs(laplacian_fd(gauge, s, p, 1e-2));
    double l2 = std::abs(laplacian_fd(gauge, s, p, 5e-3));
    double l3 = std::abs(laplacian_fd(gauge, s, p, 2.5e-3));
    CHECK(std::log2(l1 / l2) >= 1.9);
    CHECK(std::log2(l2 / l3) >= 1.9);
  }
  SUBCASE("stencil leaving the sector is refused") {
    ConeFunctionSet cone(s);
    ScalarField gauge = cone.Psi_field();
    CHECK_THROWS_AS(laplacian_fd(gauge, s, polar_point(1.0, 1e-5), 1e-3), DomainError);
    CHECK_THROWS_AS(laplacian_fd(gauge, s, polar_point(1e-4, 0.5 * s.zeta), 1e-3), DomainError);
  }
}

TEST_CASE("boundary flux of the gauge and its transform vanishes") {
  for (const WedgeSpec& s : {positive_spec(), negative_spec(), zero_spec()}) {
    ConeFunctionSet cone(s);
    ScalarField gauge = cone.Psi_field();
    ScalarField dist = cone.Phi_field();
    for (double r : {1e-3, 1e-1, 1.0, 1e2, 1e3}) {
      for (int face : {1, 2}) {
        CHECK(std::abs(boundary_flux(s, gauge, r, face)) <= 1e-10);
        CHECK(std::abs(boundary_flux(s, dist, r, face)) <= 1e-10);
      }
    }
  }
  CHECK_THROWS_AS(boundary_flux(positive_spec(), ConeFunctionSet(positive_spec()).Psi_field(),
                                0.0, 1),
                  DomainError);
}
