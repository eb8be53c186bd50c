#pragma once

#include <functional>
#include <string>

#include "wedgelab/wedge.hpp"

namespace wedgelab {

// Scalar field on the wedge with optional analytic derivatives.
struct ScalarField {
  std::string name;
  std::function<double(const Vector2d&)> value;
  std::function<Vector2d(const Vector2d&)> gradient;   // empty -> finite differences
  std::function<double(const Vector2d&)> laplacian;    // empty -> finite differences
};

// The harmonic gauge of the wedge and its companions: the angular profile
// psi, the gauge Psi (zero oblique flux on both faces), and the monotone
// origin-distance transform Phi. All evaluators are regime aware.
class ConeFunctionSet {
 public:
  explicit ConeFunctionSet(const WedgeSpec& spec);

  const WedgeSpec& spec() const { return spec_; }
  Regime regime() const { return spec_.regime; }

  double psi(double z) const;
  double Psi(double r, double z) const;
  double Phi(double r, double z) const;

  double Psi_at(const Vector2d& p) const;
  double Phi_at(const Vector2d& p) const;
  Vector2d Psi_grad(const Vector2d& p) const;  // closed form, Cartesian
  Vector2d Phi_grad(const Vector2d& p) const;

  ScalarField Psi_field() const;
  ScalarField Phi_field() const;

 private:
  void check_point(double r, double z) const;
  WedgeSpec spec_;
  double tan_zeta1_;
};

// Five-point central-difference Laplacian; the stencil must stay inside the
// open wedge and away from the tip.
double laplacian_fd(const ScalarField& fn, const WedgeSpec& spec, const Vector2d& point,
                    double h);

// g . grad(fn) at the boundary point of radius r on the given face; uses the
// field's analytic gradient when present.
double boundary_flux(const WedgeSpec& spec, const ScalarField& fn, double r, int face);

// Central-difference gradient helper for fields without an analytic one.
Vector2d gradient_fd(const ScalarField& fn, const Vector2d& point, double h);

}  // namespace wedgelab
