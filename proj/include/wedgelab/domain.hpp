#pragma once

#include "wedgelab/wedge.hpp"

namespace wedgelab {

// Simulation domain: the exact wedge, or a perturbed wedge whose faces sit at
// angular offsets beta_i(r) = bump_i * r^2 (face 1 at z = -beta_1, face 2 at
// z = zeta + beta_2). Offsets obey the quadratic closeness bound |beta_i(r)|
// <= c_D * r^2 for r <= r_D, checked on an r-grid by validate_condition_D.
struct DomainSpec {
  enum class Kind { exact_wedge, perturbed_wedge };

  Kind kind = Kind::exact_wedge;
  WedgeSpec wedge;
  double bump1 = 0.0;
  double bump2 = 0.0;
  double c_D = 0.0;
  double r_D = 1.0;

  // cached geometry
  Vector2d n1 = Vector2d::UnitY();
  Vector2d n2 = Vector2d::UnitY();
  bool convex = true;  // zeta <= pi

  static DomainSpec exact(const WedgeSpec& wedge);
  static DomainSpec perturbed(const WedgeSpec& wedge, double bump1, double bump2, double c_D,
                              double r_D);

  std::string fingerprint() const;
};

void validate_condition_D(const DomainSpec& domain);

// Face angles at radius r (face 1 low edge, face 2 high edge).
double face_angle(const DomainSpec& domain, int face, double r);
Vector2d face_point(const DomainSpec& domain, int face, double r);
// Unit inward normal of the (possibly curved) face at radius r.
Vector2d face_normal_at(const DomainSpec& domain, int face, double r);

inline bool in_domain(const DomainSpec& d, const Vector2d& p) {
  // Closure membership with an ulp-scale slack: face normals carry trig
  // rounding, so exact face points can land ~1e-17 outside the half plane.
  if (d.kind == DomainSpec::Kind::exact_wedge) {
    double slack = 1e-14 * (std::abs(p.x()) + std::abs(p.y()));
    double d1 = p.dot(d.n1);
    double d2 = p.dot(d.n2);
    return d.convex ? (d1 >= -slack && d2 >= -slack) : (d1 >= -slack || d2 >= -slack);
  }
  double r2 = p.squaredNorm();
  if (r2 == 0.0) return true;
  double z = wrapped_angle(d.wedge.zeta, p);
  return z >= -d.bump1 * r2 - 1e-13 && z <= d.wedge.zeta + d.bump2 * r2 + 1e-13;
}

}  // namespace wedgelab
