#include "wedgelab/wedge.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace wedgelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-12;
// Below this magnitude alpha is treated as exactly zero; the zero-regime
// field formulas are a different branch, not a limit of the generic ones.
constexpr double kAlphaZeroTol = 1e-9;

void check_zeta(double zeta) {
  if (!(zeta > 0.0 && zeta < 2.0 * kPi)) throw ValidationError("zeta must lie in (0, 2*pi)");
}

double face_angle(double zeta, int face) {
  if (face != 1 && face != 2) throw ValidationError("face must be 1 or 2");
  return face == 1 ? 0.0 : zeta;
}

double signed_reflection_angle(double zeta, const Vector2d& g, int face) {
  Vector2d normal = face == 1 ? Vector2d(0.0, 1.0)
                              : Vector2d(std::sin(zeta), -std::cos(zeta));
  Vector2d radial = face == 1 ? Vector2d(1.0, 0.0) : Vector2d(std::cos(zeta), std::sin(zeta));
  double along_normal = g.dot(normal);
  double along_radial = g.dot(radial);
  if (along_normal <= 0.0) {
    std::ostringstream os;
    os << "Condition G(i) violated: reflection vector on face " << face
       << " is tangential or points outward (g.n = " << along_normal << ")";
    throw ValidationError(os.str());
  }
  // Positive when the vector tilts toward the tip (negative radial part).
  return std::atan2(-along_radial, along_normal);
}

}  // namespace

std::pair<double, double> reflection_angles(double zeta, const Vector2d& g1, const Vector2d& g2) {
  check_zeta(zeta);
  return {signed_reflection_angle(zeta, g1, 1), signed_reflection_angle(zeta, g2, 2)};
}

WedgeSpec WedgeSpec::from_vectors(double zeta, const Vector2d& g1, const Vector2d& g2) {
  check_zeta(zeta);
  if (std::abs(g1.norm() - 1.0) > 1e-9 || std::abs(g2.norm() - 1.0) > 1e-9)
    throw ValidationError("reflection vectors must be unit length");
  WedgeSpec s;
  s.zeta = zeta;
  s.g1 = g1 / g1.norm();
  s.g2 = g2 / g2.norm();
  auto [z1, z2] = reflection_angles(zeta, s.g1, s.g2);
  s.zeta1 = z1;
  s.zeta2 = z2;
  s.alpha = (z1 + z2) / zeta;
  s.regime = classify_regime(s.alpha);
  s.alpha_ge_one = s.alpha >= 1.0;
  return s;
}

WedgeSpec WedgeSpec::from_angles(double zeta, double zeta1, double zeta2) {
  check_zeta(zeta);
  if (std::abs(zeta1) >= kPi / 2.0 || std::abs(zeta2) >= kPi / 2.0)
    throw ValidationError("reflection angles must lie in (-pi/2, pi/2)");
  WedgeSpec s;
  s.zeta = zeta;
  s.g1 = Vector2d(-std::sin(zeta1), std::cos(zeta1));
  s.g2 = Vector2d(std::sin(zeta - zeta2), -std::cos(zeta - zeta2));
  s.zeta1 = zeta1;
  s.zeta2 = zeta2;
  s.alpha = (zeta1 + zeta2) / zeta;
  s.regime = classify_regime(s.alpha);
  s.alpha_ge_one = s.alpha >= 1.0;
  return s;
}

Vector2d WedgeSpec::face_normal(int face) const {
  return face == 1 ? Vector2d(0.0, 1.0) : Vector2d(std::sin(zeta), -std::cos(zeta));
}

Vector2d WedgeSpec::face_radial(int face) const {
  double a = face_angle(zeta, face);
  return {std::cos(a), std::sin(a)};
}

const Vector2d& WedgeSpec::g(int face) const {
  if (face != 1 && face != 2) throw ValidationError("face must be 1 or 2");
  return face == 1 ? g1 : g2;
}

double alpha_star(const WedgeSpec& spec) { return (spec.zeta1 + spec.zeta2) / spec.zeta; }

Regime classify_regime(double alpha) {
  if (std::abs(alpha) < kAlphaZeroTol) return Regime::alpha_zero;
  return alpha > 0.0 ? Regime::alpha_positive : Regime::alpha_negative;
}

EVector find_e_vector(const WedgeSpec& spec) {
  Vector2d sum = spec.g1 + spec.g2;
  double n = sum.norm();
  if (n < kUnitTol)
    throw ValidationError(
        "Condition G(iv) fails: reflection directions are opposed, no separating vector");
  Vector2d e = sum / n;
  double c_e = std::min(e.dot(spec.g1), e.dot(spec.g2));
  if (c_e <= 0.0)
    throw ValidationError("Condition G(iv) fails: reflection cone spans a half plane or more");
  return {e, c_e};
}

namespace {

// Intersection of the short arc between g1, g2 with the open sector (0, zeta),
// as intervals in the wrapped-angle frame. The arc may cross the wrap cut,
// in which case it splits into two pieces.
std::vector<std::pair<double, double>> cone_sector_overlap(double zeta, const Vector2d& g1,
                                                           const Vector2d& g2) {
  double a1 = wrapped_angle(zeta, g1);
  double a2 = wrapped_angle(zeta, g2);
  if (a2 < a1) std::swap(a1, a2);
  std::vector<std::pair<double, double>> pieces;
  if (a2 - a1 <= kPi) {
    pieces.emplace_back(a1, a2);
  } else {
    pieces.emplace_back(zeta / 2.0 - kPi, a1);
    pieces.emplace_back(a2, zeta / 2.0 + kPi);
  }
  std::vector<std::pair<double, double>> out;
  for (auto [lo, hi] : pieces) {
    double l = std::max(lo, 0.0), h = std::min(hi, zeta);
    if (l < h) out.emplace_back(l, h);
  }
  return out;
}

}  // namespace

bool cone_meets_sector(double zeta, const Vector2d& g1, const Vector2d& g2) {
  check_zeta(zeta);
  return !cone_sector_overlap(zeta, g1, g2).empty();
}

bool check_condition_G3(const WedgeSpec& spec) {
  return cone_meets_sector(spec.zeta, spec.g1, spec.g2);
}

Vector2d restart_direction(const WedgeSpec& spec) {
  auto overlap = cone_sector_overlap(spec.zeta, spec.g1, spec.g2);
  if (overlap.empty())
    throw ValidationError("Condition G(iii) fails: reflection cone misses the open sector");
  auto widest = overlap.front();
  for (const auto& p : overlap)
    if (p.second - p.first > widest.second - widest.first) widest = p;
  double mid = 0.5 * (widest.first + widest.second);
  return {std::cos(mid), std::sin(mid)};
}

WedgeSpec perturbed_spec(const WedgeSpec& spec, double eps) {
  if (eps < 0.0) throw ValidationError("perturbation size must be nonnegative");
  if (eps == 0.0) return spec;
  Vector2d h1 = spec.g1 - eps * spec.face_radial(1);
  Vector2d h2 = spec.g2 - eps * spec.face_radial(2);
  if (h1.norm() < kUnitTol || h2.norm() < kUnitTol)
    throw ValidationError("perturbation collapses a reflection vector");
  WedgeSpec out = WedgeSpec::from_vectors(spec.zeta, h1.normalized(), h2.normalized());
  if (!(out.alpha > spec.alpha))
    throw ValidationError("perturbed alpha failed to increase");  // cannot happen for eps > 0
  return out;
}

double wrapped_angle(double zeta, const Vector2d& p) {
  double z = std::atan2(p.y(), p.x());
  // Center the wrap cut on the sector's outward bisector.
  double center = zeta / 2.0;
  while (z > center + kPi) z -= 2.0 * kPi;
  while (z <= center - kPi) z += 2.0 * kPi;
  return z;
}

}  // namespace wedgelab
