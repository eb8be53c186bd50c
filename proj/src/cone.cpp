#include "wedgelab/cone.hpp"

#include <cmath>

namespace wedgelab {

ConeFunctionSet::ConeFunctionSet(const WedgeSpec& spec)
    : spec_(spec), tan_zeta1_(std::tan(spec.zeta1)) {}

void ConeFunctionSet::check_point(double r, double z) const {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (z < -1e-9 || z > spec_.zeta + 1e-9) throw DomainError("angle outside the closed sector");
}

double ConeFunctionSet::psi(double z) const {
  if (spec_.regime == Regime::alpha_zero) return -z * tan_zeta1_;
  return std::cos(spec_.alpha * z - spec_.zeta1);
}

double ConeFunctionSet::Psi(double r, double z) const {
  check_point(r, z);
  if (spec_.regime == Regime::alpha_zero) return -std::log(r) + psi(z);
  return std::pow(r, spec_.alpha) * psi(z);
}

double ConeFunctionSet::Phi(double r, double z) const {
  switch (spec_.regime) {
    case Regime::alpha_negative:
      return 1.0 / Psi(r, z);
    case Regime::alpha_zero:
      return std::exp(-Psi(r, z));
    case Regime::alpha_positive:
    default:
      return Psi(r, z);
  }
}

double ConeFunctionSet::Psi_at(const Vector2d& p) const {
  double r = p.norm();
  double z = wrapped_angle(spec_.zeta, p);
  return Psi(r, z);
}

double ConeFunctionSet::Phi_at(const Vector2d& p) const {
  double r = p.norm();
  double z = wrapped_angle(spec_.zeta, p);
  return Phi(r, z);
}

Vector2d ConeFunctionSet::Psi_grad(const Vector2d& p) const {
  double r = p.norm();
  double z = wrapped_angle(spec_.zeta, p);
  check_point(r, z);
  if (spec_.regime == Regime::alpha_zero) {
    // grad(-log r) = -n_r / r, grad(angle) = n_theta / r.
    Vector2d n_r(std::cos(z), std::sin(z));
    Vector2d n_t(-std::sin(z), std::cos(z));
    return (-n_r - tan_zeta1_ * n_t) / r;
  }
  double a = spec_.alpha;
  double s = a * std::pow(r, a - 1.0);
  double arg = (a - 1.0) * z - spec_.zeta1;
  return {s * std::cos(arg), -s * std::sin(arg)};
}

Vector2d ConeFunctionSet::Phi_grad(const Vector2d& p) const {
  Vector2d g = Psi_grad(p);
  switch (spec_.regime) {
    case Regime::alpha_negative: {
      double v = Psi_at(p);
      return -g / (v * v);
    }
    case Regime::alpha_zero:
      return -std::exp(-Psi_at(p)) * g;
    case Regime::alpha_positive:
    default:
      return g;
  }
}

ScalarField ConeFunctionSet::Psi_field() const {
  ConeFunctionSet self = *this;
  return {"Psi", [self](const Vector2d& p) { return self.Psi_at(p); },
          [self](const Vector2d& p) { return self.Psi_grad(p); },
          [](const Vector2d&) { return 0.0; }};
}

ScalarField ConeFunctionSet::Phi_field() const {
  ConeFunctionSet self = *this;
  return {"Phi", [self](const Vector2d& p) { return self.Phi_at(p); },
          [self](const Vector2d& p) { return self.Phi_grad(p); }, nullptr};
}

double laplacian_fd(const ScalarField& fn, const WedgeSpec& spec, const Vector2d& point,
                    double h) {
  if (!(h > 0.0)) throw ValidationError("stencil width must be positive");
  if (point.norm() <= 2.0 * h) throw DomainError("stencil exits domain near the tip");
  const Vector2d dx(h, 0.0), dy(0.0, h);
  const Vector2d stencil[4] = {point + dx, point - dx, point + dy, point - dy};
  for (const auto& q : stencil) {
    double z = wrapped_angle(spec.zeta, q);
    if (!(q.norm() > 0.0) || z <= 0.0 || z >= spec.zeta)
      throw DomainError("stencil exits domain");
  }
  double c = fn.value(point);
  return (fn.value(stencil[0]) + fn.value(stencil[1]) + fn.value(stencil[2]) +
          fn.value(stencil[3]) - 4.0 * c) /
         (h * h);
}

Vector2d gradient_fd(const ScalarField& fn, const Vector2d& point, double h) {
  if (!(h > 0.0)) throw ValidationError("stencil width must be positive");
  const Vector2d dx(h, 0.0), dy(0.0, h);
  return {(fn.value(point + dx) - fn.value(point - dx)) / (2.0 * h),
          (fn.value(point + dy) - fn.value(point - dy)) / (2.0 * h)};
}

double boundary_flux(const WedgeSpec& spec, const ScalarField& fn, double r, int face) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  Vector2d p = r * spec.face_radial(face);
  Vector2d grad = fn.gradient ? fn.gradient(p) : gradient_fd(fn, p, 1e-6 * std::max(r, 1.0));
  return spec.g(face).dot(grad);
}

}  // namespace wedgelab
