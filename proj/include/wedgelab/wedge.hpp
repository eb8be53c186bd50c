#pragma once

#include <Eigen/Dense>
#include <utility>

#include "wedgelab/errors.hpp"

namespace wedgelab {

using Eigen::Vector2d;

// Regime of the corner exponent alpha = (zeta1 + zeta2) / zeta.
enum class Regime { alpha_negative, alpha_zero, alpha_positive };

// Planar sector of opening zeta with its two unit reflection directions.
// Face 1 is the ray {angle 0}, face 2 the ray {angle zeta}; the reflection
// angles zeta1/zeta2 are measured from the inward normals, positive when the
// direction tilts toward the tip.
struct WedgeSpec {
  double zeta = 0.0;
  Vector2d g1 = Vector2d::Zero();
  Vector2d g2 = Vector2d::Zero();
  // derived
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double alpha = 0.0;
  Regime regime = Regime::alpha_zero;
  bool alpha_ge_one = false;  // inconsistent with the transversality checks

  static WedgeSpec from_vectors(double zeta, const Vector2d& g1, const Vector2d& g2);
  static WedgeSpec from_angles(double zeta, double zeta1, double zeta2);

  Vector2d face_normal(int face) const;   // unit inward normal, face in {1, 2}
  Vector2d face_radial(int face) const;   // unit radial direction along the face
  const Vector2d& g(int face) const;
};

// Signed angles of the reflection vectors against the inward normals; errors
// when a vector is tangential or points outward.
std::pair<double, double> reflection_angles(double zeta, const Vector2d& g1, const Vector2d& g2);

double alpha_star(const WedgeSpec& spec);
Regime classify_regime(double alpha);

struct EVector {
  Vector2d e;
  double c_e;
};

// Unit vector maximizing the worst inner product with the two reflection
// directions (their bisector); errors when no direction separates them.
EVector find_e_vector(const WedgeSpec& spec);

// True when some nonnegative combination of g1, g2 points strictly into the
// open sector.
bool check_condition_G3(const WedgeSpec& spec);
bool cone_meets_sector(double zeta, const Vector2d& g1, const Vector2d& g2);

// Unit bisector of the directions common to the reflection cone and the open
// sector; the canonical restart direction. Errors when the cone misses the
// sector.
Vector2d restart_direction(const WedgeSpec& spec);

// Tilts both reflection vectors toward the tip by eps along the radial
// directions, renormalizes, and recomputes the angles. Strictly increases
// alpha for eps > 0.
WedgeSpec perturbed_spec(const WedgeSpec& spec, double eps);

// Point at polar angle z and radius r.
inline Vector2d polar_point(double r, double z) { return {r * std::cos(z), r * std::sin(z)}; }

// Polar angle wrapped so the sector [0, zeta] sits away from the cut.
double wrapped_angle(double zeta, const Vector2d& p);

}  // namespace wedgelab
