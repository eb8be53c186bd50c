#include "wedgelab/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "wedgelab/aux_functions.hpp"
#include "wedgelab/kernel_io.hpp"
#include "wedgelab/rng.hpp"
#include "wedgelab/stats.hpp"

namespace wedgelab {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::uint64_t sub_seed(std::uint64_t seed, const char* label, std::uint64_t index) {
  return RngStream::derive(seed, label, index).next_u64();
}

// Reference wedges: one per corner-exponent regime.
WedgeSpec spec_pull_in() {  // alpha = +1/2
  return WedgeSpec::from_angles(3.0 * kPi / 4.0, 3.0 * kPi / 16.0, 3.0 * kPi / 16.0);
}
WedgeSpec spec_pull_away() {  // alpha = -1/2
  return WedgeSpec::from_angles(kPi / 2.0, -kPi / 8.0, -kPi / 8.0);
}
WedgeSpec spec_balanced() {  // alpha = 0
  return WedgeSpec::from_angles(2.0 * kPi / 3.0, kPi / 7.0, -kPi / 7.0);
}

// Sub-stochastic kernel with row masses in [0.3, 1]; never dies.
SubKernel random_subkernel(RngStream& rng, const FiniteStateSpace& source,
                           const FiniteStateSpace& target) {
  MatrixXd w(source.size(), target.size());
  for (int i = 0; i < source.size(); ++i) {
    double mass = rng.uniform(0.3, 1.0);
    VectorXd row(target.size());
    for (int j = 0; j < target.size(); ++j) row[j] = 0.05 + rng.uniform();
    w.row(i) = (mass / row.sum()) * row.transpose();
  }
  return SubKernel(source, target, std::move(w));
}

double brute_force_tv(const VectorXd& mu, const VectorXd& nu) {
  const int n = int(mu.size());
  double best = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double d = 0.0;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) d += mu[j] - nu[j];
    best = std::max(best, std::abs(d));
  }
  return best;
}

double min_condition_c0(const ChainSequence& chain) {
  double c0 = 1.0;
  for (int k = 1; k <= chain.length(); ++k) c0 = std::min(c0, condition_c0(chain, k));
  return c0;
}

}  // namespace

void check_contraction_law(VerificationReport& rep, std::uint64_t seed, int chains,
                           int max_states, int horizon, double c0_floor, double eps0_floor,
                           ArtifactWriter* art) {
  Stopwatch sw;
  double worst = -kInf;       // max over chains, horizons, pairs of tv - rate^k
  double floor_margin = kInf; // min of recomputed bounds minus requested floors
  CsvTable sweep;
  sweep.columns = {"k", "max_spread", "bound"};
  for (int c = 0; c < chains; ++c) {
    RngStream szr = RngStream::derive(seed, "contraction/sizes", std::uint64_t(c));
    std::vector<int> sizes(size_t(horizon) + 1);
    for (auto& s : sizes) s = 2 + int(szr.below(std::uint64_t(max_states - 1)));
    ChainSequence chain = random_chain(
        {sizes, c0_floor, eps0_floor, sub_seed(seed, "contraction/chain", std::uint64_t(c))});
    double eps0 = condition_eps0(chain);
    double c0 = min_condition_c0(chain);
    floor_margin = std::min({floor_margin, eps0 - eps0_floor, c0 - c0_floor});
    double rate = 1.0 - eps0 * c0;
    MatrixXd composite;
    for (int k = 1; k <= horizon; ++k) {
      SubKernel p = normalized_kernel(chain, k);
      composite = k == 1 ? p.weights() : MatrixXd(p.weights() * composite);
      double max_tv = 0.0;
      for (int x = 0; x < composite.rows(); ++x)
        for (int y = x + 1; y < composite.rows(); ++y)
          max_tv = std::max(max_tv, 0.5 * (composite.row(x) - composite.row(y)).lpNorm<1>());
      worst = std::max(worst, max_tv - std::pow(rate, k));
      if (c == 0 && art) sweep.rows.push_back({double(k), max_tv, std::pow(rate, k)});
    }
    if (c == 0 && art) {
      std::ostringstream head;
      head << "contraction sweep, chain 0, eps0=" << format17(eps0) << " c0=" << format17(c0);
      sweep.header_comment = head.str();
      art->write_csv("contraction_sweep.csv", sweep);
      art->write("chain0.json", write_kernel_file(chain_to_file(chain)));
    }
  }
  rep.checks.push_back(make_check("contraction: pair TV below geometric bound", worst <= 1e-12,
                                  worst, 0.0, 1e-12, sw.seconds(), CheckOrigin::exact));
  rep.checks.push_back(make_check("contraction: generator floors re-verified", floor_margin >= 0.0,
                                  floor_margin, 0.0, 0.0, sw.seconds(), CheckOrigin::exact));
}

void check_tv_bound(VerificationReport& rep, std::uint64_t seed, int pairs, int max_states) {
  Stopwatch sw;
  double worst_chain = -kInf;   // lhs - rhs1 and rhs1 - rhs2
  double worst_oracle = -kInf;  // |implementation - subset enumeration|
  for (int i = 0; i < pairs; ++i) {
    RngStream rng = RngStream::derive(seed, "tvbound", std::uint64_t(i));
    int n0 = 2 + int(rng.below(std::uint64_t(max_states - 1)));
    int n1 = 2 + int(rng.below(std::uint64_t(max_states - 1)));
    int n2 = 2 + int(rng.below(std::uint64_t(max_states - 1)));
    FiniteStateSpace e0 = FiniteStateSpace::indexed("a", n0);
    FiniteStateSpace e1 = FiniteStateSpace::indexed("b", n1);
    FiniteStateSpace e2 = FiniteStateSpace::indexed("c", n2);
    std::vector<SubKernel> ks;
    ks.push_back(random_subkernel(rng, e1, e0));
    ks.push_back(random_subkernel(rng, e2, e1));
    ChainSequence chain(std::move(ks));
    int level = 1 + int(i % 2);
    int rows = chain.space(level).size();
    int x = int(rng.below(std::uint64_t(rows)));
    int xt = int(rng.below(std::uint64_t(rows)));
    TvBoundTriple t = lemma_tv_bound_check(chain, level, x, xt);
    SubKernel p = normalized_kernel(chain, level);
    double oracle =
        brute_force_tv(VectorXd(p.weights().row(x).transpose()),
                       VectorXd(p.weights().row(xt).transpose()));
    worst_oracle = std::max(worst_oracle, std::abs(t.lhs - oracle));
    worst_chain = std::max({worst_chain, t.lhs - t.rhs1, t.rhs1 - t.rhs2});
  }
  rep.checks.push_back(make_check("one-step bound: lhs <= rhs1 <= rhs2", worst_chain <= 1e-12,
                                  worst_chain, 0.0, 1e-12, sw.seconds(), CheckOrigin::oracle));
  rep.checks.push_back(make_check("one-step bound: TV matches subset enumeration",
                                  worst_oracle <= 1e-12, worst_oracle, 0.0, 1e-12, sw.seconds(),
                                  CheckOrigin::oracle));
}

void check_nu_independence(VerificationReport& rep, std::uint64_t seed, int chains, int horizon) {
  Stopwatch sw;
  double worst = -kInf;
  bool unit_exact = true;
  bool point_mass_consistent = true;
  for (int c = 0; c < chains; ++c) {
    std::vector<int> sizes(size_t(horizon) + 1);
    RngStream szr = RngStream::derive(seed, "nuind/sizes", std::uint64_t(c));
    for (auto& s : sizes) s = 2 + int(szr.below(7));
    ChainSequence chain =
        random_chain({sizes, 0.3, 0.2, sub_seed(seed, "nuind/chain", std::uint64_t(c))});
    double rate = 1.0 - condition_eps0(chain) * min_condition_c0(chain);
    RngStream frng = RngStream::derive(seed, "nuind/f", std::uint64_t(c));
    VectorXd f(chain.space(0).size());
    for (Eigen::Index j = 0; j < f.size(); ++j) f[j] = frng.uniform(-1.0, 1.0);
    double fnorm = f.cwiseAbs().maxCoeff();
    for (int k = 1; k <= chain.length(); ++k) {
      VectorXd t = tk_apply(chain, k, f);
      int arg_hi = 0, arg_lo = 0;
      t.maxCoeff(&arg_hi);
      t.minCoeff(&arg_lo);
      double hi = ergodic_ratio(chain, k, f, MeasureVec::point_mass(chain.space(k), arg_hi));
      double lo = ergodic_ratio(chain, k, f, MeasureVec::point_mass(chain.space(k), arg_lo));
      if (hi != t[arg_hi] || lo != t[arg_lo]) point_mass_consistent = false;
      worst = std::max(worst, (hi - lo) - 2.0 * std::pow(rate, k - 1) * fnorm);
    }
    ErgodicLimit unit = ergodic_limit(chain, VectorXd::Ones(chain.space(0).size()), 0.0);
    if (unit.value != 1.0 || unit.certified_error != 0.0 || unit.k_used != 1) unit_exact = false;
  }
  rep.checks.push_back(make_check("entry-law independence: adversarial gap within bound",
                                  worst <= 1e-12, worst, 0.0, 1e-12, sw.seconds(),
                                  CheckOrigin::exact));
  rep.checks.push_back(make_check("reverse limit: C(1) = 1 exactly", unit_exact, unit_exact, 1.0,
                                  0.0, sw.seconds(), CheckOrigin::exact));
  rep.checks.push_back(make_check("ratio at point mass equals T_k f", point_mass_consistent,
                                  point_mass_consistent, 1.0, 0.0, sw.seconds(),
                                  CheckOrigin::exact));

  // Linearity of the limit on a strongly contracting chain.
  Stopwatch sw2;
  std::vector<int> sizes(13, 5);
  ChainSequence chain = random_chain({sizes, 0.6, 0.5, sub_seed(seed, "nuind/linchain", 0)});
  RngStream frng = RngStream::derive(seed, "nuind/linf", 0);
  VectorXd f(chain.space(0).size()), g(chain.space(0).size());
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    f[j] = frng.uniform(-1.0, 1.0);
    g[j] = frng.uniform(-1.0, 1.0);
  }
  const double a = 2.5, b = -1.25;
  ErgodicLimit lf = ergodic_limit(chain, f, 0.01);
  ErgodicLimit lg = ergodic_limit(chain, g, 0.01);
  ErgodicLimit lab = ergodic_limit(chain, VectorXd(a * f + b * g), 0.05);
  double gap = std::abs(lab.value - a * lf.value - b * lg.value);
  double budget = lab.certified_error + std::abs(a) * lf.certified_error +
                  std::abs(b) * lg.certified_error + 1e-12;
  rep.checks.push_back(make_check("reverse limit: linearity within certified errors",
                                  gap <= budget, gap, budget, 0.0, sw2.seconds(),
                                  CheckOrigin::exact));
}

void check_cone_analytics(VerificationReport& rep, std::uint64_t seed, int alpha_cases,
                          int flux_decades) {
  Stopwatch sw;
  // Corner-exponent table: fixed reference triples plus seeded round trips.
  double worst_alpha = 0.0;
  {
    struct Case {
      double zeta, zeta1, zeta2;
    };
    std::vector<Case> cases = {{kPi / 2.0, kPi / 6.0, kPi / 12.0},
                               {kPi / 2.0, 0.0, 0.0},
                               {kPi / 2.0, -kPi / 8.0, -kPi / 8.0}};
    RngStream rng = RngStream::derive(seed, "alpha_cases", 0);
    while (int(cases.size()) < alpha_cases)
      cases.push_back({rng.uniform(0.35 * kPi, 1.2 * kPi), rng.uniform(-1.3, 1.3),
                       rng.uniform(-1.3, 1.3)});
    for (const auto& c : cases) {
      WedgeSpec s = WedgeSpec::from_angles(c.zeta, c.zeta1, c.zeta2);
      WedgeSpec rt = WedgeSpec::from_vectors(c.zeta, s.g1, s.g2);
      worst_alpha = std::max(worst_alpha, std::abs(rt.alpha - (c.zeta1 + c.zeta2) / c.zeta));
    }
    // Spot values of the closed form.
    worst_alpha = std::max(
        worst_alpha,
        std::abs(WedgeSpec::from_angles(kPi / 2.0, kPi / 6.0, kPi / 12.0).alpha - 0.5));
    worst_alpha = std::max(
        worst_alpha,
        std::abs(WedgeSpec::from_angles(kPi / 2.0, -kPi / 8.0, -kPi / 8.0).alpha + 0.5));
    worst_alpha = std::max(worst_alpha,
                           std::abs(WedgeSpec::from_angles(kPi / 2.0, 0.0, 0.0).alpha));
  }
  rep.checks.push_back(make_check("corner exponent matches (zeta1+zeta2)/zeta",
                                  worst_alpha <= 1e-12, worst_alpha, 0.0, 1e-12, sw.seconds(),
                                  CheckOrigin::exact));

  // Harmonicity: five-point residual of the gauge decays at second order.
  Stopwatch sw2;
  double min_order = kInf;
  const double hs[3] = {1e-2, 5e-3, 2.5e-3};
  for (const WedgeSpec& s : {spec_pull_in(), spec_pull_away(), spec_balanced()}) {
    ConeFunctionSet cone(s);
    ScalarField gauge = cone.Psi_field();
    double level[3] = {0.0, 0.0, 0.0};
    for (int hi = 0; hi < 3; ++hi) {
      for (double r : {0.5, 1.0, 2.0}) {
        for (double frac : {0.3, 0.5, 0.7}) {
          Vector2d p = polar_point(r, frac * s.zeta);
          level[hi] = std::max(level[hi], std::abs(laplacian_fd(gauge, s, p, hs[hi])));
        }
      }
    }
    min_order = std::min({min_order, std::log2(level[0] / level[1]),
                          std::log2(level[1] / level[2])});
  }
  rep.checks.push_back(make_check("harmonicity: FD residual order >= 1.9", min_order >= 1.9,
                                  min_order, 1.9, 0.0, sw2.seconds(), CheckOrigin::oracle));

  // Zero oblique flux across six decades of radius.
  Stopwatch sw3;
  double worst_flux = 0.0;
  for (const WedgeSpec& s : {spec_pull_in(), spec_pull_away(), spec_balanced()}) {
    ConeFunctionSet cone(s);
    ScalarField gauge = cone.Psi_field();
    ScalarField dist = cone.Phi_field();
    for (int d = -flux_decades / 2; d <= (flux_decades + 1) / 2; ++d) {
      double r = std::pow(10.0, d);
      for (int face = 1; face <= 2; ++face) {
        worst_flux = std::max(worst_flux, std::abs(boundary_flux(s, gauge, r, face)));
        worst_flux = std::max(worst_flux, std::abs(boundary_flux(s, dist, r, face)));
      }
    }
  }
  rep.checks.push_back(make_check("oblique flux of gauge and transform vanishes",
                                  worst_flux <= 1e-10, worst_flux, 0.0, 1e-10, sw3.seconds(),
                                  CheckOrigin::exact));
}

void check_barrier_signs(VerificationReport& rep, int grid) {
  Stopwatch sw;
  double worst_sign = -kInf;  // signed residual; must stay <= 1e-8
  double worst_flux = -kInf;
  bool limits_ok = true;
  for (const WedgeSpec& s : {spec_pull_in(), spec_pull_away(), spec_balanced()}) {
    AuxFunctionSet aux = aux_functions(s, 1.0);
    const double dstar = aux.delta_star;
    auto fd_extreme = [&](const ScalarField& fn, double sign) {
      // sign = +1 checks laplacian <= slack, sign = -1 checks laplacian >= -slack
      double worst = -kInf;
      for (int i = 0; i < grid; ++i) {
        double r = 0.999 * dstar * std::pow(1e-3, double(i) / (grid - 1));
        for (int j = 0; j < grid; ++j) {
          double z = s.zeta * (0.06 + 0.88 * double(j) / (grid - 1));
          double lap = laplacian_fd(fn, s, polar_point(r, z), 1e-3 * r);
          worst = std::max(worst, sign * lap);
        }
      }
      return worst;
    };
    if (aux.regime == Regime::alpha_positive) {
      worst_sign = std::max(worst_sign, fd_extreme(aux.V1, -1.0));
      worst_sign = std::max(worst_sign, fd_extreme(aux.V2, +1.0));
      for (int i = 0; i < 20; ++i) {
        double r = dstar * std::pow(1e-3, double(i) / 19.0);
        for (int face = 1; face <= 2; ++face) {
          worst_flux = std::max(worst_flux,
                                aux.c_e - boundary_flux(s, aux.V1, r, face));
          worst_flux = std::max(worst_flux,
                                boundary_flux(s, aux.V2, r, face) + aux.c_e);
        }
      }
      Vector2d tip = polar_point(1e-9 * dstar, 0.5 * s.zeta);
      if (!(aux.V1.value(tip) > 0.0 && aux.V1.value(tip) < 1e-2)) limits_ok = false;
      if (!(aux.V2.value(tip) > 0.0 && aux.V2.value(tip) < 1e-2)) limits_ok = false;
    } else {
      worst_sign = std::max(worst_sign, fd_extreme(aux.V, +1.0));
      for (int i = 0; i < 20; ++i) {
        double r = dstar * std::pow(1e-3, double(i) / 19.0);
        for (int face = 1; face <= 2; ++face)
          worst_flux = std::max(worst_flux, boundary_flux(s, aux.V, r, face) +
                                                aux.c_V * aux.c_e);
      }
      double near = aux.V.value(polar_point(1e-9 * dstar, 0.5 * s.zeta));
      double far = aux.V.value(polar_point(1e-3 * dstar, 0.5 * s.zeta));
      if (!(near > far && near > 0.0)) limits_ok = false;
    }
  }
  rep.checks.push_back(make_check("barrier Laplacian signs on shell grid", worst_sign <= 1e-8,
                                  worst_sign, 0.0, 1e-8, sw.seconds(), CheckOrigin::oracle));
  rep.checks.push_back(make_check("barrier boundary flux signs", worst_flux <= 1e-10, worst_flux,
                                  0.0, 1e-10, sw.seconds(), CheckOrigin::exact));
  rep.checks.push_back(make_check("barrier tip limits", limits_ok, limits_ok, 1.0, 0.0,
                                  sw.seconds(), CheckOrigin::exact));
}

void check_alpha_monotonicity(VerificationReport& rep, std::uint64_t seed, int specs) {
  Stopwatch sw;
  double min_gap = kInf;
  for (int i = 0; i < specs; ++i) {
    RngStream rng = RngStream::derive(seed, "alpha_mono", std::uint64_t(i));
    WedgeSpec base = WedgeSpec::from_angles(rng.uniform(0.4 * kPi, 1.1 * kPi),
                                            rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
    double prev = base.alpha;
    for (double eps : {0.05, 0.1, 0.2}) {
      WedgeSpec tilted = perturbed_spec(base, eps);
      min_gap = std::min(min_gap, tilted.alpha - prev);
      prev = tilted.alpha;
    }
  }
  rep.checks.push_back(make_check("corner exponent strictly grows under radial tilt",
                                  min_gap > 0.0, min_gap, 0.0, 0.0, sw.seconds(),
                                  CheckOrigin::exact));
}

void check_survival(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers) {
  Stopwatch sw;
  WedgeSpec s = spec_pull_away();
  DomainSpec dom = DomainSpec::exact(s);
  Coefficients coeffs = Coefficients::brownian();
  const double delta = 0.5;
  // Mid-sector start at 3/4 of the target radius; the absorbed fraction
  // scales like sqrt(eta/|x0|) * (1 - sqrt(|x0|/delta)).
  Vector2d x0 = polar_point(0.75 * delta, 0.5 * s.zeta);
  SimScaling sc;
  const double eta_fracs[3] = {1e-2, 3e-3, 1e-3};
  SurvivalEstimate est[3];
  long max_timeouts = 0;
  for (int i = 0; i < 3; ++i) {
    est[i] = survival_probability(dom, coeffs, x0, delta, sc, seed, n_runs, workers,
                                  eta_fracs[i] * delta);
    max_timeouts = std::max(max_timeouts, est[i].timeouts);
  }
  double min_step = std::min(est[1].p_hat - est[0].p_hat, est[2].p_hat - est[1].p_hat);
  rep.checks.push_back(make_check("survival nondecreasing as the absorption ball shrinks",
                                  min_step >= 0.0, min_step, 0.0, 0.0, sw.seconds(),
                                  CheckOrigin::statistical, "path-coupled eta sweep"));
  rep.checks.push_back(make_check("survival >= 0.99 at the smallest absorption radius",
                                  est[2].p_hat >= 0.99, est[2].p_hat, 0.99, 0.0, sw.seconds(),
                                  CheckOrigin::statistical));
  rep.checks.push_back(make_check("survival sweep timeout fraction below 0.1%",
                                  double(max_timeouts) <= 1e-3 * n_runs, double(max_timeouts),
                                  1e-3 * n_runs, 0.0, sw.seconds(), CheckOrigin::statistical));
}

void check_hitting_ratio(VerificationReport& rep, std::uint64_t seed, int pairs_count,
                         int n_runs, int workers) {
  Stopwatch sw;
  WedgeSpec s = spec_pull_in();
  DomainSpec dom = DomainSpec::exact(s);
  Coefficients coeffs = Coefficients::brownian();
  AuxFunctionSet aux = aux_functions(s, 0.5);
  const double delta = aux.delta_star;
  const double c0 = hitting_ratio_constant(s, delta);
  const double r_run = 0.5 * delta;
  SimScaling sc;
  double worst_margin = kInf;
  for (int i = 0; i < pairs_count; ++i) {
    double t = double(i) / std::max(1, pairs_count - 1);
    double za = s.zeta * (0.06 + 0.40 * t);
    double zb = s.zeta * (0.94 - 0.46 * t);
    SurvivalEstimate pa =
        survival_probability(dom, coeffs, polar_point(r_run, za), delta, sc,
                             sub_seed(seed, "hitpair/a", std::uint64_t(i)), n_runs, workers);
    SurvivalEstimate pb =
        survival_probability(dom, coeffs, polar_point(r_run, zb), delta, sc,
                             sub_seed(seed, "hitpair/b", std::uint64_t(i)), n_runs, workers);
    double lo = std::min(pa.p_hat / pb.p_hat, pb.p_hat / pa.p_hat);
    double se = (pa.p_hat / pb.p_hat) *
                std::sqrt(std::pow(pa.se / pa.p_hat, 2) + std::pow(pb.se / pb.p_hat, 2));
    worst_margin = std::min(worst_margin, lo - (c0 - 3.0 * se));
  }
  std::ostringstream note;
  note << "double-ratio constant " << format17(c0);
  rep.checks.push_back(make_check("same-radius survival ratio above barrier constant",
                                  worst_margin >= 0.0, worst_margin, 0.0, 0.0, sw.seconds(),
                                  CheckOrigin::statistical, note.str()));
}

void check_exit_time_scaling(VerificationReport& rep, std::uint64_t seed, int n_runs,
                             int workers) {
  Stopwatch sw;
  WedgeSpec s = spec_pull_in();
  DomainSpec dom = DomainSpec::exact(s);
  Coefficients coeffs = Coefficients::brownian();
  SimScaling sc;
  sc.eta_factor = 1e-2;
  const double delta = 0.25;
  ExitTimeEstimate t1 = mean_exit_time(dom, coeffs, delta, sc, sub_seed(seed, "exit/a", 0),
                                       n_runs, workers);
  ExitTimeEstimate t2 = mean_exit_time(dom, coeffs, delta / 4.0, sc, sub_seed(seed, "exit/b", 0),
                                       n_runs, workers);
  double ratio = t1.t_hat / t2.t_hat;
  std::ostringstream note;
  note << "t(delta)=" << format17(t1.t_hat) << " t(delta/4)=" << format17(t2.t_hat);
  rep.checks.push_back(make_check("mean exit time scales like delta^2 (ratio in 16 +/- 20%)",
                                  ratio >= 12.8 && ratio <= 19.2, ratio, 16.0, 3.2, sw.seconds(),
                                  CheckOrigin::statistical, note.str()));
}

void check_scaling_limit(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers) {
  Stopwatch sw;
  WedgeSpec s = spec_pull_in();
  DomainSpec dom = DomainSpec::perturbed(s, 0.5, -0.35, 1.0, 1.0);
  Coefficients drift;
  drift.drift_kind = Coefficients::Drift::constant;
  drift.b0 = Vector2d(0.6, 0.3);
  drift.lipschitz_bound = 1.0;
  Coefficients brown = Coefficients::brownian();
  ShellLadder ladder{0.25, 3, 16};
  SimScaling sc;
  const double start_angle = 0.5 * s.zeta;

  ExitLaw companion = exit_law(DomainSpec::exact(s), brown, polar_point(0.25, start_angle), 1.0,
                               sc, seed, "companion", n_runs, workers);
  double ks[4] = {0, 0, 0, 0};
  std::size_t deep_sizes[2] = {0, 0};
  for (int n = 1; n <= 3; ++n) {
    ExitLaw law = rescaled_exit_law(dom, drift, ladder, n, start_angle, sc, seed, n_runs,
                                    workers);
    ks[n] = ks_statistic(law.angles, companion.angles);
    if (n == 3) {
      deep_sizes[0] = law.angles.size();
      deep_sizes[1] = companion.angles.size();
    }
  }
  double crit = ks_critical(0.01, deep_sizes[0], deep_sizes[1]);
  std::ostringstream note;
  note << "KS(n=1..3) = " << format17(ks[1]) << ", " << format17(ks[2]) << ", "
       << format17(ks[3]);
  rep.checks.push_back(make_check("deep-shell rescaled law matches wedge Brownian law (KS, 1%)",
                                  ks[3] < crit, ks[3], crit, 0.0, sw.seconds(),
                                  CheckOrigin::statistical, note.str()));
  rep.checks.push_back(make_check("KS distance nonincreasing with depth",
                                  ks[1] >= ks[2] && ks[2] >= ks[3],
                                  std::min(ks[1] - ks[2], ks[2] - ks[3]), 0.0, 0.0, sw.seconds(),
                                  CheckOrigin::statistical));
}

void check_basic_identity(VerificationReport& rep, std::uint64_t seed, int n_per_bin,
                          int n_direct, int workers) {
  Stopwatch sw;
  WedgeSpec s = spec_pull_in();
  DomainSpec dom = DomainSpec::exact(s);
  Coefficients coeffs = Coefficients::brownian();
  ShellLadder ladder{1.0, 4, 16};
  SimScaling sc;
  const int n = 1;

  VectorXd ones = VectorXd::Ones(ladder.m);
  VectorXd indicator = VectorXd::Zero(ladder.m);
  indicator[8] = 1.0;

  IdentityCheck unit = basic_identity_check(dom, coeffs, ladder, n, 1, ones, sc,
                                            sub_seed(seed, "ident/unit", 0), n_per_bin / 4,
                                            n_direct / 4, 10, workers);
  rep.checks.push_back(make_check("ratio identity exact for f = 1",
                                  unit.lhs == 1.0 && unit.rhs == 1.0, unit.lhs - unit.rhs, 0.0,
                                  0.0, sw.seconds(), CheckOrigin::exact));

  Stopwatch sw1;
  IdentityCheck c1 = basic_identity_check(dom, coeffs, ladder, n, 1, indicator, sc,
                                          sub_seed(seed, "ident/k1", 0), n_per_bin, n_direct, 10,
                                          workers);
  double gap1 = std::abs(c1.lhs - c1.rhs);
  std::ostringstream note1;
  note1 << "lhs=" << format17(c1.lhs) << " rhs=" << format17(c1.rhs) << " se="
        << format17(c1.combined_se);
  rep.checks.push_back(make_check("ratio identity, one level deep (3 sigma)",
                                  gap1 <= 3.0 * c1.combined_se, gap1, 3.0 * c1.combined_se, 0.0,
                                  sw1.seconds(), CheckOrigin::statistical, note1.str()));

  Stopwatch sw2;
  IdentityCheck c2 = basic_identity_check(dom, coeffs, ladder, n, 2, indicator, sc,
                                          sub_seed(seed, "ident/k2", 0), n_per_bin, n_direct, 10,
                                          workers);
  double gap2 = std::abs(c2.lhs - c2.rhs);
  std::ostringstream note2;
  note2 << "lhs=" << format17(c2.lhs) << " rhs=" << format17(c2.rhs) << " se="
        << format17(c2.combined_se);
  rep.checks.push_back(make_check("ratio identity, two levels deep (3 sigma)",
                                  gap2 <= 3.0 * c2.combined_se, gap2, 3.0 * c2.combined_se, 0.0,
                                  sw2.seconds(), CheckOrigin::statistical, note2.str()));

  double depth_gap = std::abs(c1.rhs - c2.rhs);
  double depth_se =
      3.0 * std::sqrt(c1.se_rhs * c1.se_rhs + c2.se_rhs * c2.se_rhs);
  rep.checks.push_back(make_check("kernel-chain ratio stable in depth (3 sigma)",
                                  depth_gap <= depth_se, depth_gap, depth_se, 0.0, sw2.seconds(),
                                  CheckOrigin::statistical));

  // Contraction transfer on the measured kernels.
  Stopwatch sw3;
  std::vector<SubKernel> measured;
  for (const auto& ek : c2.kernels) measured.push_back(ek.kernel);
  ChainSequence chain(std::move(measured));
  double eps0 = condition_eps0(chain);
  double c0 = min_condition_c0(chain);
  double bound = 1.0 - eps0 * c0;
  VectorXd t1 = tk_apply(chain, 1, indicator);
  VectorXd t2 = tk_apply(chain, 2, indicator);
  double rate_hat =
      (t2.maxCoeff() - t2.minCoeff()) / std::max(t1.maxCoeff() - t1.minCoeff(), 1e-300);

  // Bootstrap spread-rate noise by resampling kernel rows from their counts.
  RngStream boot = RngStream::derive(seed, "ident/boot", 0);
  std::vector<double> diffs;
  for (int b = 0; b < 48; ++b) {
    std::vector<SubKernel> resampled;
    for (const auto& ek : c2.kernels) {
      const int m = int(ek.counts.rows());
      MatrixXd w = MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        long trials = long(ek.attempts[i]);
        VectorXd cdf(m);
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
          acc += ek.kernel.weights()(i, j);
          cdf[j] = acc;
        }
        for (long t = 0; t < trials; ++t) {
          double u = boot.uniform();
          if (u >= acc) continue;  // killed
          int j = int(std::lower_bound(cdf.data(), cdf.data() + m, u) - cdf.data());
          w(i, j) += 1.0;
        }
        w.row(i) /= double(trials);
      }
      resampled.emplace_back(ek.kernel.source(), ek.kernel.target(), std::move(w));
    }
    ChainSequence bchain(std::move(resampled));
    VectorXd bt1 = tk_apply(bchain, 1, indicator);
    VectorXd bt2 = tk_apply(bchain, 2, indicator);
    double brate = (bt2.maxCoeff() - bt2.minCoeff()) /
                   std::max(bt1.maxCoeff() - bt1.minCoeff(), 1e-300);
    double bbound = 1.0 - condition_eps0(bchain) * min_condition_c0(bchain);
    diffs.push_back(brate - bbound);
  }
  double sd = std::sqrt(sample_variance(diffs));
  std::ostringstream note3;
  note3 << "rate=" << format17(rate_hat) << " bound=" << format17(bound);
  rep.checks.push_back(make_check("measured-kernel spread decays within contraction bound",
                                  rate_hat <= bound + 3.0 * sd, rate_hat, bound + 3.0 * sd, 0.0,
                                  sw3.seconds(), CheckOrigin::statistical, note3.str()));
  (void)sw;
}

void check_determinism(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers) {
  Stopwatch sw;
  auto kernel_families = [&](VerificationReport& r) {
    check_contraction_law(r, seed, 50, 12, 20, 0.3, 0.2, nullptr);
    check_tv_bound(r, seed, 200, 6);
    check_nu_independence(r, seed, 10, 20);
  };
  VerificationReport left, right;
  kernel_families(left);
  kernel_families(right);
  bool bytes_equal = left.to_json() == right.to_json();
  ChainSequence c1 = random_chain({{4, 5, 6, 5}, 0.3, 0.2, sub_seed(seed, "det/chain", 0)});
  ChainSequence c2 = random_chain({{4, 5, 6, 5}, 0.3, 0.2, sub_seed(seed, "det/chain", 0)});
  bool file_equal = write_kernel_file(chain_to_file(c1)) == write_kernel_file(chain_to_file(c2));
  rep.checks.push_back(make_check("kernel-algebra families byte-reproducible",
                                  bytes_equal && file_equal, bytes_equal && file_equal, 1.0, 0.0,
                                  sw.seconds(), CheckOrigin::exact));

  Stopwatch sw2;
  WedgeSpec s = spec_pull_away();
  DomainSpec dom = DomainSpec::exact(s);
  Coefficients coeffs = Coefficients::brownian();
  const double delta = 0.5;
  Vector2d x0 = polar_point(0.75 * delta, 0.5 * s.zeta);
  SimScaling sc;
  SurvivalEstimate serial = survival_probability(dom, coeffs, x0, delta, sc, seed, n_runs, 1,
                                                 1e-3 * delta);
  SurvivalEstimate threaded = survival_probability(dom, coeffs, x0, delta, sc, seed, n_runs,
                                                   std::max(workers, 4), 1e-3 * delta);
  bool same = serial.survived == threaded.survived && serial.p_hat == threaded.p_hat &&
              serial.timeouts == threaded.timeouts;
  rep.checks.push_back(make_check("survival identical across worker counts {1, 4}", same, same,
                                  1.0, 0.0, sw2.seconds(), CheckOrigin::exact));
}

void check_sim_fast(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers) {
  Stopwatch sw;
  WedgeSpec s = spec_pull_away();
  DomainSpec dom = DomainSpec::exact(s);
  Coefficients coeffs = Coefficients::brownian();
  const double delta = 0.5;
  Vector2d x0 = polar_point(0.25, 0.5 * s.zeta);
  SimScaling sc;
  SurvivalEstimate wide = survival_probability(dom, coeffs, x0, delta, sc, seed, n_runs, workers,
                                               1e-2 * delta);
  SurvivalEstimate tight = survival_probability(dom, coeffs, x0, delta, sc, seed, n_runs,
                                                workers, 1e-3 * delta);
  rep.checks.push_back(make_check("eta sweep monotone (reduced scale)",
                                  tight.p_hat >= wide.p_hat, tight.p_hat - wide.p_hat, 0.0, 0.0,
                                  sw.seconds(), CheckOrigin::statistical));

  Stopwatch sw2;
  SimScaling fine = sc;
  fine.h_factor = 0.5 * sc.h_factor;
  SurvivalEstimate coarse_h = survival_probability(dom, coeffs, x0, delta, sc, seed, n_runs,
                                                   workers, 1e-2 * delta);
  SurvivalEstimate fine_h = survival_probability(dom, coeffs, x0, delta, fine, seed, n_runs,
                                                 workers, 1e-2 * delta);
  double gap = std::abs(coarse_h.p_hat - fine_h.p_hat);
  double budget = 3.0 * std::sqrt(coarse_h.se * coarse_h.se + fine_h.se * fine_h.se) + 1e-12;
  rep.checks.push_back(make_check("halving the step moves survival < 3 sigma", gap <= budget,
                                  gap, budget, 0.0, sw2.seconds(), CheckOrigin::statistical));

  Stopwatch sw3;
  ShellLadder ladder{1.0, 3, 16};
  EmpiricalKernel ek = estimate_kernel(DomainSpec::exact(spec_pull_in()), coeffs, ladder, 1,
                                       std::max(50, n_runs / 2), sc, seed, workers);
  bool rows_ok = (ek.kernel.row_sums().array() <= 1.0 + 1e-12).all();
  KernelFile file;
  file.spaces = {ek.kernel.target(), ek.kernel.source()};
  file.entries.push_back({1, 0, ek.kernel.weights(), ek.counts, ek.stderrs, ek.fingerprint});
  KernelFile back = read_kernel_file(write_kernel_file(file));
  bool round_trip = back.entries.size() == 1 &&
                    (back.entries[0].rows.array() == ek.kernel.weights().array()).all();
  rep.checks.push_back(make_check("empirical kernel valid and file round trip exact",
                                  rows_ok && round_trip, rows_ok && round_trip, 1.0, 0.0,
                                  sw3.seconds(), CheckOrigin::exact));
}

namespace {

json analytics_json(const WedgeSpec& spec, double delta_star_request) {
  json out;
  out["alpha_star"] = spec.alpha;
  out["zeta1"] = spec.zeta1;
  out["zeta2"] = spec.zeta2;
  out["condition_G3"] = check_condition_G3(spec);
  bool g4 = true;
  try {
    EVector ev = find_e_vector(spec);
    out["e"] = {ev.e.x(), ev.e.y()};
    out["c_e"] = ev.c_e;
  } catch (const ValidationError&) {
    g4 = false;
    out["e"] = nullptr;
    out["c_e"] = nullptr;
  }
  out["condition_G4"] = g4;
  out["c0_hitting"] = nullptr;
  out["delta_star"] = nullptr;
  if (g4 && spec.alpha < 1.0) {
    AuxFunctionSet aux = aux_functions(spec, delta_star_request);
    out["delta_star"] = aux.delta_star;
    if (spec.regime == Regime::alpha_positive)
      out["c0_hitting"] = hitting_ratio_constant(spec, aux.delta_star);
  }
  return out;
}

CsvTable field_table(const WedgeSpec& spec, double delta_star) {
  ConeFunctionSet cone(spec);
  bool split = spec.regime == Regime::alpha_positive && spec.alpha < 1.0;
  AuxFunctionSet aux = aux_functions(spec, delta_star);
  CsvTable t;
  t.columns = {"r", "z", "Psi", "Phi"};
  if (split) {
    t.columns.push_back("V1");
    t.columns.push_back("V2");
  } else {
    t.columns.push_back("V");
  }
  std::ostringstream head;
  head << "zeta=" << format17(spec.zeta) << " zeta1=" << format17(spec.zeta1)
       << " zeta2=" << format17(spec.zeta2) << " alpha=" << format17(spec.alpha);
  t.header_comment = head.str();
  const int nr = 24, nz = 24;
  for (int i = 0; i <= nr; ++i) {
    double r = aux.delta_star * std::pow(1e-3, double(i) / nr);
    for (int j = 0; j <= nz; ++j) {
      double z = spec.zeta * (0.02 + 0.96 * double(j) / nz);
      Vector2d p = polar_point(r, z);
      std::vector<double> row = {r, z, cone.Psi(r, z), cone.Phi(r, z)};
      if (split) {
        row.push_back(aux.V1.value(p));
        row.push_back(aux.V2.value(p));
      } else {
        row.push_back(aux.V.value(p));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

void scenario_ergodic(const ExperimentConfig& cfg, std::uint64_t seed, VerificationReport& rep,
                      ArtifactWriter& art) {
  json opts = cfg.raw.contains("ergodic") ? cfg.raw.at("ergodic") : json::object();
  int chains = opts.value("chains", 50);
  int max_states = opts.value("max_states", 12);
  int horizon = opts.value("horizon", 20);
  double c0_floor = opts.value("c0_floor", 0.3);
  double eps0_floor = opts.value("eps0_floor", 0.2);
  if (chains < 1 || max_states < 2 || horizon < 1 || c0_floor <= 0.0 || c0_floor >= 1.0 ||
      eps0_floor <= 0.0 || eps0_floor >= 1.0)
    throw ValidationError("config.ergodic: values out of range");
  check_contraction_law(rep, seed, chains, max_states, horizon, c0_floor, eps0_floor, &art);
  check_tv_bound(rep, seed, std::min(4 * chains, 200), 6);
  check_nu_independence(rep, seed, std::max(1, chains / 5), horizon);
}

void scenario_wedge(const ExperimentConfig& cfg, std::uint64_t seed, VerificationReport& rep,
                    ArtifactWriter& art) {
  WedgeSpec spec = wedge_from_json(resolve_section(cfg, "wedge"), "config.wedge");
  json opts = cfg.raw.contains("wedge_analyze") ? cfg.raw.at("wedge_analyze") : json::object();
  double dstar = opts.value("delta_star", 1.0);
  art.write("analytics.json", analytics_json(spec, dstar).dump(2) + "\n");
  if (opts.value("emit_tables", false) && spec.alpha < 1.0)
    art.write_csv("fields.csv", field_table(spec, dstar));
  check_cone_analytics(rep, seed, 20);
  check_barrier_signs(rep, 40);
}

void scenario_simulate(const ExperimentConfig& cfg, std::uint64_t seed, VerificationReport& rep,
                       ArtifactWriter& art) {
  DomainSpec dom = domain_from_json(resolve_section(cfg, "domain"), "config.domain");
  Coefficients coeffs =
      has_section(cfg, "coefficients")
          ? coefficients_from_json(resolve_section(cfg, "coefficients"), "config.coefficients")
          : Coefficients::brownian();
  SimScaling sc = cfg.raw.contains("sim") ? scaling_from_json(cfg.raw.at("sim"), "config.sim")
                                          : SimScaling{};
  json opts = cfg.raw.contains("simulate") ? cfg.raw.at("simulate") : json::object();
  if (!opts.contains("target_radius") || !opts.contains("start"))
    throw ValidationError("config.simulate: target_radius and start are required");
  double target = opts.at("target_radius").get<double>();
  Vector2d x0(opts.at("start").at(0).get<double>(), opts.at("start").at(1).get<double>());
  int replicates = opts.value("replicates", 100);
  int bins = opts.value("bins", 16);
  bool dump = opts.value("path_dump", false);
  long stride = opts.value("dump_stride", 1);
  if (replicates < 1 || bins < 1 || bins > 120)
    throw ValidationError("config.simulate: replicates/bins out of range");

  SimParams base = params_for_target(dom.wedge, target, sc, seed);
  std::ostringstream fp;
  fp << "domain{" << dom.fingerprint() << "} coeffs{" << coeffs.fingerprint() << "} "
     << base.fingerprint();

  std::vector<PathOutcome> outs(static_cast<std::size_t>(replicates));
  CsvTable paths;
  paths.columns = {"replicate", "step", "t", "x", "y", "pushback"};
  paths.header_comment = fp.str();
  for (int i = 0; i < replicates; ++i) {
    SimParams p = base;
    p.seed = sub_seed(seed, "simulate", std::uint64_t(i));
    if (dump) {
      std::vector<PathSample> samples;
      outs[size_t(i)] = simulate_recorded(dom, coeffs, x0, target, p, samples, stride, bins);
      for (const auto& smp : samples)
        paths.rows.push_back({double(i), double(smp.step), smp.t, smp.x, smp.y, smp.push});
    } else {
      outs[size_t(i)] = simulate_to_shell(dom, coeffs, x0, target, p, bins);
    }
  }
  CsvTable table;
  table.columns = {"replicate", "terminal_kind", "bin", "elapsed", "pushes", "steps"};
  table.header_comment = fp.str();
  long timeouts = 0;
  bool feasible = true;
  for (int i = 0; i < replicates; ++i) {
    const PathOutcome& o = outs[size_t(i)];
    timeouts += o.terminal == PathOutcome::Terminal::timeout ? 1 : 0;
    feasible = feasible && in_domain(dom, o.end);
    table.rows.push_back({double(i), double(int(o.terminal)), double(o.bin), o.elapsed, o.pushes,
                          double(o.steps)});
  }
  art.write_csv("outcomes.csv", table);
  if (dump) art.write_csv("paths.csv", paths);

  rep.checks.push_back(make_check("all terminal points feasible", feasible, feasible, 1.0, 0.0,
                                  0.0, CheckOrigin::exact));
  rep.checks.push_back(make_check("timeout fraction below 0.1%",
                                  double(timeouts) <= 1e-3 * replicates, double(timeouts),
                                  1e-3 * replicates, 0.0, 0.0, CheckOrigin::statistical));
  SimParams p0 = base;
  p0.seed = sub_seed(seed, "simulate", 0);
  PathOutcome redo = simulate_to_shell(dom, coeffs, x0, target, p0, bins);
  bool det = (redo.end.array() == outs[0].end.array()).all() &&
             redo.steps == outs[0].steps && redo.elapsed == outs[0].elapsed;
  rep.checks.push_back(make_check("replicate 0 bit-reproducible", det, det, 1.0, 0.0, 0.0,
                                  CheckOrigin::exact));
}

void scenario_kernels(const ExperimentConfig& cfg, std::uint64_t seed, VerificationReport& rep,
                      ArtifactWriter& art) {
  DomainSpec dom = domain_from_json(resolve_section(cfg, "domain"), "config.domain");
  Coefficients coeffs =
      has_section(cfg, "coefficients")
          ? coefficients_from_json(resolve_section(cfg, "coefficients"), "config.coefficients")
          : Coefficients::brownian();
  SimScaling sc = cfg.raw.contains("sim") ? scaling_from_json(cfg.raw.at("sim"), "config.sim")
                                          : SimScaling{};
  ShellLadder ladder = cfg.raw.contains("ladder")
                           ? ladder_from_json(cfg.raw.at("ladder"), "config.ladder")
                           : ShellLadder{};
  json opts = cfg.raw.contains("kernels") ? cfg.raw.at("kernels") : json::object();
  if (!opts.contains("n_per_bin"))
    throw ValidationError("config.kernels: n_per_bin is required");
  int n_per_bin = opts.at("n_per_bin").get<int>();
  if (n_per_bin < 1) throw ValidationError("config.kernels.n_per_bin: must be positive");
  std::vector<int> shells = opts.contains("shells") ? opts.at("shells").get<std::vector<int>>()
                                                    : std::vector<int>{1};
  bool all_ok = true;
  for (int n : shells) {
    if (n < 1 || n > ladder.n_max)
      throw ValidationError("config.kernels.shells: index out of ladder range");
    EmpiricalKernel ek =
        estimate_kernel(dom, coeffs, ladder, n, n_per_bin, sc, seed, cfg.workers);
    KernelFile file;
    file.spaces = {ek.kernel.target(), ek.kernel.source()};
    file.entries.push_back({1, 0, ek.kernel.weights(), ek.counts, ek.stderrs, ek.fingerprint});
    std::string text = write_kernel_file(file);
    art.write("kernel_shell" + std::to_string(n) + ".json", text);
    KernelFile back = read_kernel_file(text);
    all_ok = all_ok && back.entries.size() == 1 &&
             (back.entries[0].rows.array() == ek.kernel.weights().array()).all() &&
             (ek.kernel.row_sums().array() <= 1.0 + 1e-12).all();
  }
  rep.checks.push_back(make_check("kernels valid and round-trip exact", all_ok, all_ok, 1.0, 0.0,
                                  0.0, CheckOrigin::exact));
}

void scenario_verify(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& suite,
                     VerificationReport& rep, ArtifactWriter& art) {
  (void)art;
  bool any = false;
  if (suite == "kernel" || suite == "all") {
    any = true;
    check_contraction_law(rep, seed, 12, 10, 15, 0.3, 0.2, nullptr);
    check_tv_bound(rep, seed, 60, 6);
    check_nu_independence(rep, seed, 5, 15);
  }
  if (suite == "wedge" || suite == "all") {
    any = true;
    check_cone_analytics(rep, seed, 20);
    check_barrier_signs(rep, 40);
    check_alpha_monotonicity(rep, seed, 6);
  }
  if (suite == "sim" || suite == "all") {
    any = true;
    check_sim_fast(rep, seed, 400, cfg.workers);
    check_determinism(rep, seed, 400, cfg.workers);
  }
  if (!any) throw ValidationError("config.verify.suite: expected kernel, wedge, sim or all");
}

}  // namespace

int run_scenario(const ExperimentConfig& cfg, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override, std::ostream& log) {
  const std::uint64_t seed = seed_override ? *seed_override : cfg.seed;

  std::function<void(VerificationReport&, ArtifactWriter&)> exec;
  try {
    if (cfg.scenario == "ergodic_synthetic") {
      exec = [&cfg, seed](VerificationReport& r, ArtifactWriter& a) {
        scenario_ergodic(cfg, seed, r, a);
      };
    } else if (cfg.scenario == "wedge_analyze") {
      // Decode eagerly so config problems surface as config errors.
      wedge_from_json(resolve_section(cfg, "wedge"), "config.wedge");
      exec = [&cfg, seed](VerificationReport& r, ArtifactWriter& a) {
        scenario_wedge(cfg, seed, r, a);
      };
    } else if (cfg.scenario == "simulate") {
      domain_from_json(resolve_section(cfg, "domain"), "config.domain");
      exec = [&cfg, seed](VerificationReport& r, ArtifactWriter& a) {
        scenario_simulate(cfg, seed, r, a);
      };
    } else if (cfg.scenario == "estimate_kernels") {
      domain_from_json(resolve_section(cfg, "domain"), "config.domain");
      exec = [&cfg, seed](VerificationReport& r, ArtifactWriter& a) {
        scenario_kernels(cfg, seed, r, a);
      };
    } else if (cfg.scenario == "verify") {
      std::string suite = "all";
      if (cfg.raw.contains("verify") && cfg.raw.at("verify").contains("suite"))
        suite = cfg.raw.at("verify").at("suite").get<std::string>();
      if (suite != "kernel" && suite != "wedge" && suite != "sim" && suite != "all")
        throw ValidationError("config.verify.suite: expected kernel, wedge, sim or all");
      exec = [&cfg, seed, suite](VerificationReport& r, ArtifactWriter& a) {
        scenario_verify(cfg, seed, suite, r, a);
      };
    } else {
      throw ValidationError("config.scenario: unknown scenario '" + cfg.scenario + "'");
    }
  } catch (const ValidationError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config_error;
  }

  VerificationReport rep;
  try {
    ArtifactWriter art(out_dir);
    exec(rep, art);
    art.write("report.json", rep.to_json());
    art.write_manifest();
    // Wall-clock sidecar stays outside the manifest; it is not reproducible.
    std::ofstream timing(std::filesystem::path(out_dir) / "timing.json");
    timing << rep.timing_json();
  } catch (const ValidationError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << "\n";
    return exit_runtime_error;
  }
  rep.print(log);
  return rep.overall_pass() ? exit_ok : exit_check_failure;
}

}  // namespace wedgelab
