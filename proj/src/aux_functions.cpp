#include "wedgelab/aux_functions.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace wedgelab {

namespace {

constexpr double kMargin = 1e-6;

double grad_norm_sq(const WedgeSpec& spec, double r) {
  if (spec.regime == Regime::alpha_zero) {
    double t = std::tan(spec.zeta1);
    return (1.0 + t * t) / (r * r);
  }
  double a = spec.alpha;
  return a * a * std::pow(r, 2.0 * (a - 1.0));
}

// Worst angular profile value; the cosine argument runs linearly from -zeta1
// to zeta2, both inside (-pi/2, pi/2).
double psi_min(const WedgeSpec& spec) {
  return std::min(std::cos(spec.zeta1), std::cos(spec.zeta2));
}

bool shell_feasible(const WedgeSpec& spec, const ConeFunctionSet& cone, const Vector2d& e,
                    double delta) {
  switch (spec.regime) {
    case Regime::alpha_negative:
      // ln(ln(Psi)) needs Psi > e on the whole shell; Psi grows toward the tip.
      return psi_min(spec) * std::pow(delta, spec.alpha) >= std::exp(1.0) + kMargin;
    case Regime::alpha_zero:
      // ln(Psi) needs Psi > 1; worst case at radius delta.
      return -std::log(delta) + std::min(0.0, -spec.zeta * std::tan(spec.zeta1)) >=
             1.0 + kMargin;
    case Regime::alpha_positive:
    default: {
      // V1, V2 must stay positive; check relative to the gauge on a grid
      // (both behave like Psi near the tip, so the ratio is the stable test).
      const int nr = 48, nz = 48;
      for (int i = 0; i <= nr; ++i) {
        double r = delta * std::pow(1e-4, double(i) / nr);
        for (int j = 0; j <= nz; ++j) {
          double z = spec.zeta * double(j) / nz;
          Vector2d p = polar_point(r, z);
          double gauge = cone.Psi(r, z);
          double v1 = std::expm1(gauge) + e.dot(p);
          double v2 = std::log1p(gauge) - e.dot(p);
          if (v1 <= kMargin * gauge || v2 <= kMargin * gauge) return false;
        }
      }
      return true;
    }
  }
}

// Half the grid infimum of f(Psi(x)) / |x| over the shell, refined until the
// change drops below 1%.
double choose_c_V(const WedgeSpec& spec, const ConeFunctionSet& cone, double delta,
                  bool log_log) {
  auto grid_inf = [&](int n) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      double r = delta * std::pow(1e-3, double(i) / n);
      for (int j = 0; j <= n; ++j) {
        double z = spec.zeta * double(j) / n;
        double gauge = cone.Psi(r, z);
        double f = log_log ? std::log(std::log(gauge)) : std::log(gauge);
        best = std::min(best, f / r);
      }
    }
    return best;
  };
  int n = 32;
  double prev = grid_inf(n);
  for (int pass = 0; pass < 6; ++pass) {
    n *= 2;
    double cur = grid_inf(n);
    if (std::abs(cur - prev) <= 0.01 * std::abs(prev)) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  return 0.5 * prev;
}

}  // namespace

AuxFunctionSet aux_functions(const WedgeSpec& spec, double delta_star) {
  if (!(delta_star > 0.0)) throw ValidationError("shell radius must be positive");
  if (spec.alpha >= 1.0)
    throw RegimeError("alpha >= 1: no barrier construction in this regime");

  ConeFunctionSet cone(spec);
  EVector ev = find_e_vector(spec);

  AuxFunctionSet out;
  out.regime = spec.regime;
  out.e = ev.e;
  out.c_e = ev.c_e;

  double delta = delta_star;
  bool found = false;
  for (int j = 0; j < 60; ++j) {
    if (shell_feasible(spec, cone, ev.e, delta)) {
      found = true;
      break;
    }
    delta *= 0.5;
  }
  if (!found) throw ValidationError("no positive shell radius certifies the barrier bounds");
  out.delta_star = delta;

  const Vector2d e = ev.e;
  if (spec.regime == Regime::alpha_positive) {
    out.V1 = ScalarField{
        "V1",
        [cone, e](const Vector2d& p) { return std::expm1(cone.Psi_at(p)) + e.dot(p); },
        [cone, e](const Vector2d& p) {
          return Vector2d(std::exp(cone.Psi_at(p)) * cone.Psi_grad(p) + e);
        },
        [cone, spec](const Vector2d& p) {
          return std::exp(cone.Psi_at(p)) * grad_norm_sq(spec, p.norm());
        }};
    out.V2 = ScalarField{
        "V2",
        [cone, e](const Vector2d& p) { return std::log1p(cone.Psi_at(p)) - e.dot(p); },
        [cone, e](const Vector2d& p) {
          return Vector2d(cone.Psi_grad(p) / (1.0 + cone.Psi_at(p)) - e);
        },
        [cone, spec](const Vector2d& p) {
          double u = 1.0 + cone.Psi_at(p);
          return -grad_norm_sq(spec, p.norm()) / (u * u);
        }};
    return out;
  }

  const bool log_log = spec.regime == Regime::alpha_negative;
  out.c_V = choose_c_V(spec, cone, delta, log_log);
  const double c_V = out.c_V;
  if (log_log) {
    out.V = ScalarField{
        "V",
        [cone, e, c_V](const Vector2d& p) {
          return std::log(std::log(cone.Psi_at(p))) - c_V * e.dot(p);
        },
        [cone, e, c_V](const Vector2d& p) {
          double u = cone.Psi_at(p);
          return Vector2d(cone.Psi_grad(p) / (u * std::log(u)) - c_V * e);
        },
        [cone, spec](const Vector2d& p) {
          double u = cone.Psi_at(p);
          double lu = std::log(u);
          return -(1.0 + lu) / (u * lu * u * lu) * grad_norm_sq(spec, p.norm());
        }};
  } else {
    out.V = ScalarField{
        "V",
        [cone, e, c_V](const Vector2d& p) { return std::log(cone.Psi_at(p)) - c_V * e.dot(p); },
        [cone, e, c_V](const Vector2d& p) {
          return Vector2d(cone.Psi_grad(p) / cone.Psi_at(p) - c_V * e);
        },
        [cone, spec](const Vector2d& p) {
          double u = cone.Psi_at(p);
          return -grad_norm_sq(spec, p.norm()) / (u * u);
        }};
  }
  return out;
}

double hitting_ratio_constant(const WedgeSpec& spec, double delta_star, int initial_grid) {
  if (spec.regime != Regime::alpha_positive || spec.alpha >= 1.0)
    throw RegimeError("hitting ratio constant requires 0 < alpha < 1");
  AuxFunctionSet aux = aux_functions(spec, delta_star);
  const double d_hi = aux.delta_star;

  auto grid_value = [&](int n) {
    double worst1 = std::numeric_limits<double>::infinity();
    double worst2 = worst1;
    for (int i = 0; i <= n; ++i) {
      double d = d_hi * std::pow(1e-8, double(i) / n);
      double v1_lo = std::numeric_limits<double>::infinity(), v1_hi = 0.0;
      double v2_lo = v1_lo, v2_hi = 0.0;
      for (int j = 0; j <= n; ++j) {
        double z = spec.zeta * double(j) / n;
        Vector2d p = polar_point(d, z);
        double v1 = aux.V1.value(p);
        double v2 = aux.V2.value(p);
        v1_lo = std::min(v1_lo, v1);
        v1_hi = std::max(v1_hi, v1);
        v2_lo = std::min(v2_lo, v2);
        v2_hi = std::max(v2_hi, v2);
      }
      worst1 = std::min(worst1, v1_lo / v2_hi);
      worst2 = std::min(worst2, v2_lo / v1_hi);
    }
    return worst1 * worst2;
  };

  int n = std::max(8, initial_grid);
  double prev = grid_value(n);
  for (int pass = 0; pass < 6; ++pass) {
    n *= 2;
    double cur = grid_value(n);
    bool stable = std::abs(cur - prev) <= 0.01 * std::abs(prev);
    prev = cur;
    if (stable) break;
  }
  return prev;
}

}  // namespace wedgelab
