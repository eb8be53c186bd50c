#include "wedgelab/domain.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wedgelab {

namespace {
constexpr double kPi = std::numbers::pi;
}

DomainSpec DomainSpec::exact(const WedgeSpec& wedge) {
  DomainSpec d;
  d.kind = Kind::exact_wedge;
  d.wedge = wedge;
  d.n1 = wedge.face_normal(1);
  d.n2 = wedge.face_normal(2);
  d.convex = wedge.zeta <= kPi;
  return d;
}

DomainSpec DomainSpec::perturbed(const WedgeSpec& wedge, double bump1, double bump2, double c_D,
                                 double r_D) {
  DomainSpec d;
  d.kind = Kind::perturbed_wedge;
  d.wedge = wedge;
  d.bump1 = bump1;
  d.bump2 = bump2;
  d.c_D = c_D;
  d.r_D = r_D;
  d.n1 = wedge.face_normal(1);
  d.n2 = wedge.face_normal(2);
  d.convex = wedge.zeta <= kPi;
  validate_condition_D(d);
  return d;
}

std::string DomainSpec::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << (kind == Kind::exact_wedge ? "exact" : "perturbed") << " zeta=" << wedge.zeta
     << " zeta1=" << wedge.zeta1 << " zeta2=" << wedge.zeta2;
  if (kind == Kind::perturbed_wedge)
    os << " bump1=" << bump1 << " bump2=" << bump2 << " c_D=" << c_D << " r_D=" << r_D;
  return os.str();
}

void validate_condition_D(const DomainSpec& domain) {
  if (domain.kind == DomainSpec::Kind::exact_wedge) return;
  if (!(domain.c_D > 0.0) || !(domain.r_D > 0.0))
    throw ValidationError("perturbed wedge requires positive c_D and r_D");
  const double span_margin = kPi - domain.wedge.zeta / 2.0;
  const int grid = 64;
  for (int i = 1; i <= grid; ++i) {
    double r = domain.r_D * double(i) / grid;
    double r2 = r * r;
    for (int face = 1; face <= 2; ++face) {
      double beta = (face == 1 ? domain.bump1 : domain.bump2) * r2;
      std::ostringstream os;
      os.precision(17);
      if (std::abs(beta) > domain.c_D * r2 + 1e-15) {
        os << "face " << face << " offset " << beta << " exceeds c_D*r^2 at r=" << r;
        throw ValidationError(os.str());
      }
      // Hausdorff distance between the radius-r arcs.
      double chord = 2.0 * r * std::sin(std::abs(beta) / 2.0);
      if (chord > domain.c_D * r2 * (1.0 + 1e-9) + 1e-15) {
        os << "face " << face << " arc distance " << chord << " exceeds c_D*r^2 at r=" << r;
        throw ValidationError(os.str());
      }
      if (std::abs(beta) >= span_margin)
        throw ValidationError("perturbation folds the domain past the wrap window");
    }
  }
}

double face_angle(const DomainSpec& domain, int face, double r) {
  if (face != 1 && face != 2) throw ValidationError("face must be 1 or 2");
  if (domain.kind == DomainSpec::Kind::exact_wedge)
    return face == 1 ? 0.0 : domain.wedge.zeta;
  double r2 = r * r;
  return face == 1 ? -domain.bump1 * r2 : domain.wedge.zeta + domain.bump2 * r2;
}

Vector2d face_point(const DomainSpec& domain, int face, double r) {
  return polar_point(r, face_angle(domain, face, r));
}

Vector2d face_normal_at(const DomainSpec& domain, int face, double r) {
  if (domain.kind == DomainSpec::Kind::exact_wedge) return face == 1 ? domain.n1 : domain.n2;
  double theta = face_angle(domain, face, r);
  double dtheta = (face == 1 ? -domain.bump1 : domain.bump2) * 2.0 * r;
  double c = std::cos(theta), s = std::sin(theta);
  Vector2d tangent(c - r * dtheta * s, s + r * dtheta * c);
  tangent.normalize();
  // Face 1 bounds the domain from below, face 2 from above.
  return face == 1 ? Vector2d(-tangent.y(), tangent.x()) : Vector2d(tangent.y(), -tangent.x());
}

}  // namespace wedgelab
