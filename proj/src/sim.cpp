#include "wedgelab/sim.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "wedgelab/rng.hpp"
#include "wedgelab/stats.hpp"

namespace wedgelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Deterministic replicate map: fn(i) fills slot i of caller-owned storage, so
// aggregation order (and therefore every emitted byte) is independent of the
// worker count.
template <class F>
void parallel_replicates(long n, int workers, F&& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  const long chunk = std::max<long>(1, n / (8L * workers));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      long start = next.fetch_add(chunk);
      if (start >= n) return;
      long stop = std::min(n, start + chunk);
      try {
        for (long i = start; i < stop; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(size_t(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Minimal s >= 0 with y + s*g inside the exact wedge; NaN when no such s.
double minimal_push_exact(const DomainSpec& d, const Vector2d& y, const Vector2d& g) {
  const double d1 = y.dot(d.n1), g1 = g.dot(d.n1);
  const double d2 = y.dot(d.n2), g2 = g.dot(d.n2);
  if (d.convex) {
    double lo = 0.0, hi = kInf;
    const double ds[2] = {d1, d2}, gs[2] = {g1, g2};
    for (int i = 0; i < 2; ++i) {
      if (ds[i] < 0.0) {
        if (gs[i] <= 0.0) return kNaN;
        lo = std::max(lo, -ds[i] / gs[i]);
      } else if (gs[i] < 0.0) {
        hi = std::min(hi, ds[i] / -gs[i]);
      }
    }
    return lo <= hi ? lo : kNaN;
  }
  if (d1 >= 0.0 || d2 >= 0.0) return 0.0;
  double best = kInf;
  if (g1 > 0.0) best = std::min(best, -d1 / g1);
  if (g2 > 0.0) best = std::min(best, -d2 / g2);
  return std::isfinite(best) ? best : kNaN;
}

// Minimal feasible push for the curved faces: closed-form seed on the
// underlying wedge, then geometric growth and bisection on membership.
double minimal_push_curved(const DomainSpec& d, const Vector2d& y, const Vector2d& g) {
  double seed = minimal_push_exact(d, y, g);
  if (!std::isfinite(seed)) seed = 1e-6 * (y.norm() + 1e-30);
  double s_hi = std::max(seed, 1e-12 * (y.norm() + 1e-30));
  const double cap = 1e6 * (y.norm() + 1.0);
  int grow = 0;
  while (!in_domain(d, Vector2d(y + s_hi * g))) {
    s_hi *= 2.0;
    if (s_hi > cap || ++grow > 200) return kNaN;
  }
  double s_lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (s_lo + s_hi);
    if (in_domain(d, Vector2d(y + mid * g)))
      s_hi = mid;
    else
      s_lo = mid;
  }
  return s_hi;
}

// Grows s by ulp-scale bumps until the landing point passes the membership
// test; the binding constraint lands exactly on the face up to rounding.
bool settle_push(const DomainSpec& d, const Vector2d& y, const Vector2d& g, double& s) {
  Vector2d p = y + s * g;
  for (int i = 0; i < 64; ++i) {
    if (in_domain(d, p)) return true;
    s += std::max({s, p.norm(), 1e-30}) * 1e-15;
    p = y + s * g;
  }
  return false;
}

struct FaceViolation {
  double v1 = 0.0;
  double v2 = 0.0;
};

FaceViolation face_violations(const DomainSpec& d, const Vector2d& p) {
  FaceViolation out;
  if (d.kind == DomainSpec::Kind::exact_wedge) {
    out.v1 = -p.dot(d.n1);
    out.v2 = -p.dot(d.n2);
    return out;
  }
  double r2 = p.squaredNorm();
  double z = wrapped_angle(d.wedge.zeta, p);
  out.v1 = (-d.bump1 * r2) - z;
  out.v2 = z - (d.wedge.zeta + d.bump2 * r2);
  return out;
}

}  // namespace

Coefficients Coefficients::brownian() {
  Coefficients c;
  c.lipschitz_bound = 1.0;
  return c;
}

std::string Coefficients::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  switch (drift_kind) {
    case Drift::zero: os << "b=0"; break;
    case Drift::constant: os << "b=(" << b0.x() << "," << b0.y() << ")"; break;
    case Drift::linear:
      os << "b=(" << b0.x() << "," << b0.y() << ")+[" << B(0, 0) << "," << B(0, 1) << ";"
         << B(1, 0) << "," << B(1, 1) << "]x";
      break;
  }
  os << " sigma=";
  if (sigma_kind == Sigma::identity)
    os << "I";
  else
    os << "(1+" << sigma_slope << "*min(|x|," << sigma_cap << "))I";
  return os.str();
}

void validate_coefficients(const Coefficients& coeffs, std::uint64_t seed, int pairs) {
  if (!(coeffs.lipschitz_bound >= 0.0) || !std::isfinite(coeffs.lipschitz_bound))
    throw ValidationError("coefficients need a finite declared Lipschitz bound");
  Vector2d at0 = coeffs.diffuse(Vector2d::Zero(), 1.0, 1.0, 0.0);
  if ((at0 - Vector2d(1.0, 0.0)).norm() > 1e-12)
    throw ValidationError("sigma(0) must be the identity");
  if (coeffs.sigma_kind == Coefficients::Sigma::isotropic_affine && coeffs.sigma_cap <= 0.0)
    throw ValidationError("sigma cap must be positive");
  RngStream rng = RngStream::derive(seed, "coeff_check", 0);
  double bound = coeffs.lipschitz_bound + 1e-9;
  for (int i = 0; i < pairs; ++i) {
    Vector2d x(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    Vector2d y(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    double dist = (x - y).norm();
    if (dist == 0.0) continue;
    if ((coeffs.drift(x) - coeffs.drift(y)).norm() > bound * dist)
      throw ValidationError("drift violates the declared Lipschitz bound");
    Vector2d unit(1.0, 0.0);
    double sx = coeffs.diffuse(x, 1.0, 1.0, 0.0).x();
    double sy = coeffs.diffuse(y, 1.0, 1.0, 0.0).x();
    if (std::abs(sx - sy) > bound * dist)
      throw ValidationError("sigma violates the declared Lipschitz bound");
  }
}

std::string SimParams::fingerprint() const {
  std::ostringstream os;
  os << "h=" << fmt17(h) << " eta=" << fmt17(eta) << " rho=" << fmt17(rho) << " g0=("
     << fmt17(g0.x()) << "," << fmt17(g0.y()) << ") seed=" << seed
     << " max_steps=" << max_steps;
  return os.str();
}

SimParams params_for_target(const WedgeSpec& wedge, double target_radius,
                            const SimScaling& scaling, std::uint64_t seed) {
  if (!(target_radius > 0.0)) throw ValidationError("target radius must be positive");
  if (!(scaling.h_factor > 0.0) || !(scaling.eta_factor > 0.0) || scaling.eta_factor >= 1.0)
    throw ValidationError("scaling factors out of range");
  SimParams p;
  p.h = scaling.h_factor * target_radius * target_radius;
  p.eta = scaling.eta_factor * target_radius;
  p.rho = 0.5 * p.eta;
  p.g0 = restart_direction(wedge);
  p.seed = seed;
  p.max_steps = scaling.max_steps;
  return p;
}

double ShellLadder::radius(int n) const {
  if (n < 0) throw ValidationError("shell index must be nonnegative");
  return std::ldexp(delta_star, -2 * n);
}

double ShellLadder::halfway_radius(int n) const {
  if (n < 1) throw ValidationError("halfway radius needs n >= 1");
  return std::ldexp(delta_star, -2 * n + 1);
}

int ShellLadder::bin_of(double angle, double zeta) const {
  double z = std::clamp(angle, 0.0, zeta);
  int j = int(z / zeta * m);
  return std::clamp(j, 0, m - 1);
}

double ShellLadder::bin_mid_angle(int j, double zeta) const {
  if (j < 0 || j >= m) throw ValidationError("bin index out of range");
  return (j + 0.5) * zeta / m;
}

FiniteStateSpace ShellLadder::space(int n) const {
  return FiniteStateSpace::indexed("E" + std::to_string(n) + "/b", m);
}

StepOutcome reflect_step(const DomainSpec& domain, const Coefficients& coeffs, const Vector2d& x,
                         double z0, double z1, double h) {
  if (!(h > 0.0)) throw ValidationError("step size must be positive");
  double h_try = h;
  for (int attempt = 0; attempt < 9; ++attempt, h_try *= 0.5) {
    const double sqrt_h = std::sqrt(h_try);
    Vector2d prop = x + coeffs.drift(x) * h_try + coeffs.diffuse(x, sqrt_h, z0, z1);
    if (in_domain(domain, prop)) return {prop, 0.0, h_try};

    FaceViolation v = face_violations(domain, prop);
    const bool corner = v.v1 > 0.0 && v.v2 > 0.0;
    int order[2];
    order[0] = v.v1 >= v.v2 ? 1 : 2;  // face with the larger violation first
    order[1] = order[0] == 1 ? 2 : 1;

    double best_s = kNaN;
    int best_face = 0;
    for (int t = 0; t < 2; ++t) {
      int face = order[t];
      const Vector2d& g = domain.wedge.g(face);
      double s = domain.kind == DomainSpec::Kind::exact_wedge
                     ? minimal_push_exact(domain, prop, g)
                     : minimal_push_curved(domain, prop, g);
      if (!std::isfinite(s)) continue;
      if (!settle_push(domain, prop, g, s)) continue;
      if (!corner && t == 0) {
        best_s = s;
        best_face = face;
        break;  // nearest-face push succeeded
      }
      if (!std::isfinite(best_s) || s < best_s) {
        best_s = s;
        best_face = face;
      }
    }
    if (std::isfinite(best_s))
      return {Vector2d(prop + best_s * domain.wedge.g(best_face)), best_s, h_try};
  }
  throw SimulationError("no finite pushback restores feasibility; step rejected");
}

namespace {

PathOutcome run_excursion(const DomainSpec& domain, const Coefficients& coeffs,
                          const Vector2d& start, double target_radius, const SimParams& params,
                          int m_bins, RngStream& rng, bool restarting) {
  const double target2 = target_radius * target_radius;
  const double eta2 = params.eta * params.eta;
  const double zeta = domain.wedge.zeta;
  const ShellLadder binner{1.0, 0, m_bins};

  PathOutcome out;
  Vector2d x = start;
  bool armed = x.squaredNorm() > eta2;
  while (true) {
    const double r2 = x.squaredNorm();
    if (r2 >= target2) {
      out.terminal = PathOutcome::Terminal::shell_hit;
      out.angle = wrapped_angle(zeta, x);
      out.bin = binner.bin_of(out.angle, zeta);
      break;
    }
    if (armed && r2 <= eta2) {
      if (restarting) {
        ++out.restarts;
        x = params.rho * params.g0;
        armed = false;
        continue;
      }
      out.terminal = PathOutcome::Terminal::absorbed;
      out.angle = wrapped_angle(zeta, x);
      break;
    }
    if (!armed && r2 > eta2) armed = true;
    if (out.steps >= params.max_steps) {
      out.terminal = PathOutcome::Terminal::timeout;
      break;
    }
    // Per-shell step scaling: full h in the outer band, (4|x|/target)^2 h
    // below it, floored at the absorption scale.
    double band = 16.0 * std::max(r2, eta2) / target2;
    double h = params.h * std::min(1.0, band);
    double g0, g1;
    rng.normal_pair(g0, g1);
    StepOutcome st = reflect_step(domain, coeffs, x, g0, g1, h);
    x = st.x;
    out.elapsed += st.dt;
    out.pushes += st.push;
    ++out.steps;
  }
  out.end = x;
  return out;
}

void check_common(const DomainSpec& domain, double target_radius, const SimParams& params) {
  if (!(target_radius > 0.0)) throw ValidationError("target radius must be positive");
  if (!(params.h > 0.0)) throw ValidationError("step size must be positive");
  if (!(params.eta > 0.0) || params.eta >= target_radius)
    throw ValidationError("absorption radius must lie in (0, target)");
  if (!(params.rho > 0.0)) throw ValidationError("restart displacement must be positive");
  if (!in_domain(domain, Vector2d(params.rho * params.g0)))
    throw ValidationError("restart point lies outside the domain");
}

}  // namespace

PathOutcome simulate_to_shell(const DomainSpec& domain, const Coefficients& coeffs,
                              const Vector2d& x0, double target_radius, const SimParams& params,
                              int m_bins) {
  check_common(domain, target_radius, params);
  if (!(x0.norm() > params.eta))
    throw ValidationError("start must lie outside the absorption ball");
  if (!in_domain(domain, x0)) throw ValidationError("start lies outside the domain");
  RngStream rng = RngStream::derive(params.seed, "excursion", 0);
  return run_excursion(domain, coeffs, x0, target_radius, params, m_bins, rng, false);
}

PathOutcome simulate_restarting(const DomainSpec& domain, const Coefficients& coeffs,
                                double target_radius, const SimParams& params, int m_bins) {
  check_common(domain, target_radius, params);
  RngStream rng = RngStream::derive(params.seed, "excursion", 0);
  return run_excursion(domain, coeffs, Vector2d(params.rho * params.g0), target_radius, params,
                       m_bins, rng, true);
}

PathOutcome simulate_recorded(const DomainSpec& domain, const Coefficients& coeffs,
                              const Vector2d& x0, double target_radius, const SimParams& params,
                              std::vector<PathSample>& out, long stride, int m_bins) {
  check_common(domain, target_radius, params);
  if (!in_domain(domain, x0)) throw ValidationError("start lies outside the domain");
  if (stride < 1) throw ValidationError("stride must be positive");
  RngStream rng = RngStream::derive(params.seed, "excursion", 0);

  const double target2 = target_radius * target_radius;
  const double eta2 = params.eta * params.eta;
  const ShellLadder binner{1.0, 0, m_bins};
  PathOutcome res;
  Vector2d x = x0;
  bool armed = x.squaredNorm() > eta2;
  out.push_back({0, 0.0, x.x(), x.y(), 0.0});
  while (true) {
    const double r2 = x.squaredNorm();
    if (r2 >= target2) {
      res.terminal = PathOutcome::Terminal::shell_hit;
      res.angle = wrapped_angle(domain.wedge.zeta, x);
      res.bin = binner.bin_of(res.angle, domain.wedge.zeta);
      break;
    }
    if (armed && r2 <= eta2) {
      res.terminal = PathOutcome::Terminal::absorbed;
      res.angle = wrapped_angle(domain.wedge.zeta, x);
      break;
    }
    if (!armed && r2 > eta2) armed = true;
    if (res.steps >= params.max_steps) {
      res.terminal = PathOutcome::Terminal::timeout;
      break;
    }
    double band = 16.0 * std::max(r2, eta2) / target2;
    double h = params.h * std::min(1.0, band);
    double g0, g1;
    rng.normal_pair(g0, g1);
    StepOutcome st = reflect_step(domain, coeffs, x, g0, g1, h);
    x = st.x;
    res.elapsed += st.dt;
    res.pushes += st.push;
    ++res.steps;
    if (res.steps % stride == 0)
      out.push_back({res.steps, res.elapsed, x.x(), x.y(), st.push});
  }
  res.end = x;
  return res;
}

namespace {

// Raw per-replicate terminal records for one shell-to-shell kernel row block:
// value = target bin, -1 absorbed, -2 timeout.
std::vector<std::int8_t> kernel_raw(const DomainSpec& domain, const Coefficients& coeffs,
                                    const ShellLadder& ladder, int n, int n_per_bin,
                                    const SimScaling& scaling, std::uint64_t seed, int workers,
                                    double eta_override) {
  if (n < 1) throw ValidationError("kernel shell index must be >= 1");
  if (n_per_bin <= 0) throw ValidationError("n_per_bin must be positive");
  if (ladder.m < 1 || ladder.m > 120) throw ValidationError("bin count out of range");
  const double r_in = ladder.radius(n);
  const double r_out = ladder.radius(n - 1);
  SimParams base = params_for_target(domain.wedge, r_out, scaling, seed);
  if (eta_override > 0.0) {
    if (eta_override >= r_in) throw ValidationError("absorption override exceeds the shell");
    base.eta = eta_override;
    base.rho = 0.5 * eta_override;
  }
  const int m = ladder.m;
  const std::string label = "kernel/n=" + std::to_string(n);
  std::vector<std::int8_t> term(size_t(m) * size_t(n_per_bin));
  parallel_replicates(long(term.size()), workers, [&](long idx) {
    const int bin = int(idx / n_per_bin);
    const long rep = idx % n_per_bin;
    RngStream rng =
        RngStream::derive(base.seed, label + "/b=" + std::to_string(bin), std::uint64_t(rep));
    Vector2d x0 = polar_point(r_in, ladder.bin_mid_angle(bin, domain.wedge.zeta));
    PathOutcome o = run_excursion(domain, coeffs, x0, r_out, base, m, rng, false);
    switch (o.terminal) {
      case PathOutcome::Terminal::shell_hit: term[size_t(idx)] = std::int8_t(o.bin); break;
      case PathOutcome::Terminal::absorbed: term[size_t(idx)] = -1; break;
      case PathOutcome::Terminal::timeout: term[size_t(idx)] = -2; break;
    }
  });
  return term;
}

EmpiricalKernel kernel_from_raw(const DomainSpec& domain, const Coefficients& coeffs,
                                const ShellLadder& ladder, int n,
                                const std::vector<std::int8_t>& term, int n_per_bin, long lo,
                                long hi, const SimScaling& scaling, std::uint64_t seed,
                                double eta_override) {
  const int m = ladder.m;
  MatrixXd counts = MatrixXd::Zero(m, m);
  VectorXd attempts = VectorXd::Zero(m);
  VectorXd timeouts = VectorXd::Zero(m);
  for (int bin = 0; bin < m; ++bin) {
    for (long rep = lo; rep < hi; ++rep) {
      std::int8_t t = term[size_t(bin) * size_t(n_per_bin) + size_t(rep)];
      attempts[bin] += 1.0;
      if (t >= 0)
        counts(bin, t) += 1.0;
      else if (t == -2)
        timeouts[bin] += 1.0;
    }
  }
  MatrixXd weights = counts / double(hi - lo);
  MatrixXd se(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double p = weights(i, j);
      se(i, j) = std::sqrt(p * (1.0 - p) / double(hi - lo));
    }
  std::ostringstream meta;
  meta << "domain{" << domain.fingerprint() << "} coeffs{" << coeffs.fingerprint() << "} shell="
       << n << " n_per_bin=" << (hi - lo) << " h_factor=" << fmt17(scaling.h_factor)
       << " eta_factor=" << fmt17(scaling.eta_factor);
  if (eta_override > 0.0) meta << " eta=" << fmt17(eta_override);
  meta << " seed=" << seed;
  return EmpiricalKernel{SubKernel(ladder.space(n), ladder.space(n - 1), weights),
                         std::move(counts), std::move(se), std::move(attempts),
                         std::move(timeouts), meta.str()};
}

}  // namespace

EmpiricalKernel estimate_kernel(const DomainSpec& domain, const Coefficients& coeffs,
                                const ShellLadder& ladder, int n, int n_per_bin,
                                const SimScaling& scaling, std::uint64_t seed, int workers,
                                double eta_override) {
  auto term = kernel_raw(domain, coeffs, ladder, n, n_per_bin, scaling, seed, workers,
                         eta_override);
  return kernel_from_raw(domain, coeffs, ladder, n, term, n_per_bin, 0, n_per_bin, scaling, seed,
                         eta_override);
}

SurvivalEstimate survival_probability(const DomainSpec& domain, const Coefficients& coeffs,
                                      const Vector2d& x, double delta, const SimScaling& scaling,
                                      std::uint64_t seed, int n_runs, int workers,
                                      double eta_override) {
  if (n_runs <= 0) throw ValidationError("n_runs must be positive");
  if (!(x.norm() > 0.0) || x.norm() > delta * (1.0 + 1e-12))
    throw ValidationError("start must satisfy 0 < |x| <= delta");
  SimParams base = params_for_target(domain.wedge, delta, scaling, seed);
  if (eta_override > 0.0) {
    base.eta = eta_override;
    base.rho = 0.5 * eta_override;
  }
  if (!(x.norm() > base.eta)) throw ValidationError("start inside the absorption ball");
  std::vector<std::int8_t> term(static_cast<std::size_t>(n_runs));
  parallel_replicates(n_runs, workers, [&](long i) {
    RngStream rng = RngStream::derive(base.seed, "survival", std::uint64_t(i));
    PathOutcome o = run_excursion(domain, coeffs, x, delta, base, 16, rng, false);
    term[size_t(i)] = o.terminal == PathOutcome::Terminal::shell_hit
                          ? std::int8_t(1)
                          : (o.terminal == PathOutcome::Terminal::absorbed ? std::int8_t(0)
                                                                           : std::int8_t(-2));
  });
  SurvivalEstimate out;
  out.n = n_runs;
  for (auto t : term) {
    if (t == 1)
      ++out.survived;
    else if (t == 0)
      ++out.absorbed;
    else
      ++out.timeouts;
  }
  WilsonInterval w = wilson_interval(out.survived, out.n);
  out.p_hat = w.p_hat;
  out.se = w.se;
  out.wilson_lo = w.lo;
  out.wilson_hi = w.hi;
  return out;
}

ExitTimeEstimate mean_exit_time(const DomainSpec& domain, const Coefficients& coeffs,
                                double delta, const SimScaling& scaling, std::uint64_t seed,
                                int n_runs, int workers) {
  if (n_runs <= 0) throw ValidationError("n_runs must be positive");
  SimParams base = params_for_target(domain.wedge, delta, scaling, seed);
  std::vector<double> elapsed(size_t(n_runs), 0.0);
  std::vector<double> restarts(size_t(n_runs), 0.0);
  std::vector<std::int8_t> timed_out(size_t(n_runs), 0);
  parallel_replicates(n_runs, workers, [&](long i) {
    RngStream rng = RngStream::derive(base.seed, "exit_time", std::uint64_t(i));
    PathOutcome o = run_excursion(domain, coeffs, Vector2d(base.rho * base.g0), delta, base, 16,
                                  rng, true);
    elapsed[size_t(i)] = o.elapsed;
    restarts[size_t(i)] = double(o.restarts);
    timed_out[size_t(i)] = o.terminal == PathOutcome::Terminal::timeout ? 1 : 0;
  });
  ExitTimeEstimate out;
  out.n = n_runs;
  for (auto t : timed_out) out.timeouts += t;
  out.t_hat = mean(elapsed);
  out.se = mean_stderr(elapsed);
  out.mean_restarts = mean(restarts);
  return out;
}

ExitLaw exit_law(const DomainSpec& domain, const Coefficients& coeffs, const Vector2d& x0,
                 double target_radius, const SimScaling& scaling, std::uint64_t seed,
                 const std::string& label, int n_runs, int workers) {
  if (n_runs <= 0) throw ValidationError("n_runs must be positive");
  SimParams base = params_for_target(domain.wedge, target_radius, scaling, seed);
  if (!(x0.norm() > base.eta)) throw ValidationError("start inside the absorption ball");
  std::vector<double> angles(size_t(n_runs), kNaN);
  std::vector<std::int8_t> kind(size_t(n_runs), 0);
  parallel_replicates(n_runs, workers, [&](long i) {
    RngStream rng = RngStream::derive(base.seed, label, std::uint64_t(i));
    PathOutcome o = run_excursion(domain, coeffs, x0, target_radius, base, 16, rng, false);
    if (o.terminal == PathOutcome::Terminal::shell_hit) {
      angles[size_t(i)] = o.angle;
      kind[size_t(i)] = 1;
    } else {
      kind[size_t(i)] = o.terminal == PathOutcome::Terminal::absorbed ? 0 : -2;
    }
  });
  ExitLaw out;
  out.n = n_runs;
  for (long i = 0; i < n_runs; ++i) {
    if (kind[size_t(i)] == 1)
      out.angles.push_back(angles[size_t(i)]);
    else if (kind[size_t(i)] == 0)
      ++out.absorbed;
    else
      ++out.timeouts;
  }
  return out;
}

ExitLaw rescaled_exit_law(const DomainSpec& domain, const Coefficients& coeffs,
                          const ShellLadder& ladder, int n, double start_angle,
                          const SimScaling& scaling, std::uint64_t seed, int n_runs,
                          int workers) {
  if (n < 1) throw ValidationError("shell index must be >= 1");
  Vector2d x0 = polar_point(ladder.radius(n), start_angle);
  // One shared stream label across n: matched replicates are exact dyadic
  // rescalings of each other when the coefficients are scale invariant.
  return exit_law(domain, coeffs, x0, ladder.radius(n - 1), scaling, seed, "rescaled", n_runs,
                  workers);
}

IdentityCheck basic_identity_check(const DomainSpec& domain, const Coefficients& coeffs,
                                   const ShellLadder& ladder, int n, int k, const VectorXd& f,
                                   const SimScaling& scaling, std::uint64_t seed, int n_per_bin,
                                   int n_direct, int batches, int workers) {
  if (n < 0) throw ValidationError("shell index must be nonnegative");
  if (k < 1) throw ValidationError("depth k must be >= 1");
  if (f.size() != ladder.m) throw DimensionError("f must live on the shell-n bins");
  if (batches < 2) throw ValidationError("need at least two batches");
  // Round run counts up to full batch blocks.
  n_per_bin = ((n_per_bin + batches - 1) / batches) * batches;
  n_direct = ((n_direct + batches - 1) / batches) * batches;

  const double r_n = ladder.radius(n);
  const double r_nk = ladder.radius(n + k);
  // One absorption radius for every component, so the direct law, the
  // kernels and the entry law all see the same killed process.
  const double eta_common = scaling.eta_factor * r_nk;

  IdentityCheck out;

  // Shell-to-shell kernels Q-hat_{n+1} .. Q-hat_{n+k}.
  std::vector<std::vector<std::int8_t>> raw;
  for (int l = n + 1; l <= n + k; ++l) {
    std::uint64_t kseed = seed ^ (0x9E3779B97F4A7C15ull * std::uint64_t(l + 1));
    raw.push_back(kernel_raw(domain, coeffs, ladder, l, n_per_bin, scaling, kseed, workers,
                             eta_common));
    out.kernels.push_back(kernel_from_raw(domain, coeffs, ladder, l, raw.back(), n_per_bin, 0,
                                          n_per_bin, scaling, kseed, eta_common));
  }

  // Direct law of the shell-n hit for the restarted process.
  SimParams pd = params_for_target(domain.wedge, r_n, scaling, seed);
  pd.eta = eta_common;
  pd.rho = 0.5 * eta_common;
  std::vector<std::int8_t> direct_bin(size_t(n_direct), -2);
  parallel_replicates(n_direct, workers, [&](long i) {
    RngStream rng = RngStream::derive(seed, "identity/direct", std::uint64_t(i));
    PathOutcome o = run_excursion(domain, coeffs, Vector2d(pd.rho * pd.g0), r_n, pd, ladder.m,
                                  rng, true);
    direct_bin[size_t(i)] =
        o.terminal == PathOutcome::Terminal::shell_hit ? std::int8_t(o.bin) : std::int8_t(-2);
  });

  // Entry law at shell n+k for the fresh-start process (no restarts): the
  // killed mass is exactly the absorbed fraction.
  SimParams pe = params_for_target(domain.wedge, r_nk, scaling, seed);
  pe.eta = eta_common;
  pe.rho = 0.5 * eta_common;
  std::vector<std::int8_t> entry_bin(size_t(n_direct), -1);
  parallel_replicates(n_direct, workers, [&](long i) {
    RngStream rng = RngStream::derive(seed, "identity/entry", std::uint64_t(i));
    PathOutcome o = run_excursion(domain, coeffs, Vector2d(pe.rho * pe.g0), r_nk, pe, ladder.m,
                                  rng, false);
    entry_bin[size_t(i)] =
        o.terminal == PathOutcome::Terminal::shell_hit ? std::int8_t(o.bin) : std::int8_t(-1);
  });

  auto lhs_of = [&](long lo, long hi) {
    double s = 0.0;
    long cnt = 0;
    for (long i = lo; i < hi; ++i) {
      if (direct_bin[size_t(i)] >= 0) {
        s += f[direct_bin[size_t(i)]];
        ++cnt;
      }
    }
    if (cnt == 0) throw SimulationError("no direct run reached the shell");
    return s / double(cnt);
  };
  auto nu_of = [&](long lo, long hi) {
    VectorXd mass = VectorXd::Zero(ladder.m);
    for (long i = lo; i < hi; ++i)
      if (entry_bin[size_t(i)] >= 0) mass[entry_bin[size_t(i)]] += 1.0;
    return VectorXd(mass / double(hi - lo));
  };
  auto rhs_of = [&](const std::vector<long>& klo, const std::vector<long>& khi, long dlo,
                    long dhi) {
    std::vector<SubKernel> kernels;
    for (int j = 0; j < k; ++j) {
      EmpiricalKernel ek =
          kernel_from_raw(domain, coeffs, ladder, n + 1 + j, raw[size_t(j)], n_per_bin,
                          klo[size_t(j)], khi[size_t(j)], scaling, seed, eta_common);
      kernels.push_back(ek.kernel);
    }
    ChainSequence chain(std::move(kernels));
    MeasureVec nu(ladder.space(n + k), nu_of(dlo, dhi));
    return ergodic_ratio(chain, k, f, nu);
  };

  out.lhs = lhs_of(0, n_direct);
  std::vector<long> zero(size_t(k), 0), full(size_t(k), n_per_bin);
  out.rhs = rhs_of(zero, full, 0, n_direct);
  out.entry_mass = nu_of(0, n_direct);
  out.entry_runs = n_direct;

  std::vector<double> lhs_b, rhs_b;
  const long dblock = n_direct / batches;
  const long kblock = n_per_bin / batches;
  for (int b = 0; b < batches; ++b) {
    lhs_b.push_back(lhs_of(b * dblock, (b + 1) * dblock));
    std::vector<long> klo(size_t(k), b * kblock), khi(size_t(k), (b + 1) * kblock);
    try {
      rhs_b.push_back(rhs_of(klo, khi, b * dblock, (b + 1) * dblock));
    } catch (const DeadChainError&) {
      // A block whose entry runs all died carries no ratio information.
    }
  }
  if (rhs_b.size() < 2)
    throw DeadChainError("entry law too thin for a batch error estimate", n + k, -1);
  out.se_lhs = mean_stderr(lhs_b);
  out.se_rhs = mean_stderr(rhs_b);
  out.combined_se = std::sqrt(out.se_lhs * out.se_lhs + out.se_rhs * out.se_rhs);
  return out;
}

}  // namespace wedgelab
