#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wedgelab/domain.hpp"
#include "wedgelab/kernel.hpp"

namespace wedgelab {

// Drift/diffusion fields from a small Lipschitz family. sigma(0) = I by
// construction for every kind.
struct Coefficients {
  enum class Drift { zero, constant, linear };
  enum class Sigma { identity, isotropic_affine };

  Drift drift_kind = Drift::zero;
  Vector2d b0 = Vector2d::Zero();
  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();

  Sigma sigma_kind = Sigma::identity;
  double sigma_slope = 0.0;  // sigma(x) = (1 + slope * min(|x|, cap)) * I
  double sigma_cap = 1.0;

  double lipschitz_bound = 0.0;

  static Coefficients brownian();

  Vector2d drift(const Vector2d& x) const {
    switch (drift_kind) {
      case Drift::zero: return Vector2d::Zero();
      case Drift::constant: return b0;
      case Drift::linear: default: return b0 + B * x;
    }
  }

  // sigma(x) applied to the scaled Gaussian pair.
  Vector2d diffuse(const Vector2d& x, double sqrt_h, double z0, double z1) const {
    Vector2d w(sqrt_h * z0, sqrt_h * z1);
    if (sigma_kind == Sigma::identity) return w;
    double s = 1.0 + sigma_slope * std::min(x.norm(), sigma_cap);
    return s * w;
  }

  std::string fingerprint() const;
};

// Lipschitz spot check on seeded point pairs plus the sigma(0) = I contract.
void validate_coefficients(const Coefficients& coeffs, std::uint64_t seed = 7, int pairs = 256);

// Step, absorption and restart scales for one excursion. The absorption ball
// B_eta is the operational stand-in for the tip; restarts jump to rho * g0
// and absorption re-arms only once the path has left B_eta again.
struct SimParams {
  double h = 0.0;
  double eta = 0.0;
  double rho = 0.0;
  Vector2d g0 = Vector2d::UnitX();
  std::uint64_t seed = 0;
  long max_steps = 100000000;

  std::string fingerprint() const;
};

struct SimScaling {
  double h_factor = 1e-4;    // h = h_factor * target_radius^2 in the outer band
  double eta_factor = 1e-3;  // eta = eta_factor * target_radius
  long max_steps = 100000000;
};

// Canonical per-excursion parameters for a given target radius.
SimParams params_for_target(const WedgeSpec& wedge, double target_radius,
                            const SimScaling& scaling, std::uint64_t seed);

// Dyadic ladder of circles |x| = delta_star * 2^(-2n) with m angular bins
// partitioning [0, zeta].
struct ShellLadder {
  double delta_star = 1.0;
  int n_max = 3;
  int m = 16;

  double radius(int n) const;
  double halfway_radius(int n) const;  // 2^(-2n+1) * delta_star
  int bin_of(double angle, double zeta) const;
  double bin_mid_angle(int j, double zeta) const;
  FiniteStateSpace space(int n) const;  // labels "E<n>/b<j>"
};

struct StepOutcome {
  Vector2d x;
  double push;  // pushback length applied, 0 for interior steps
  double dt;    // may be below the requested h after step rejections
};

// One Euler step with oblique pushback. A proposal leaving the domain is
// projected back along the reflection direction of the nearest face with the
// minimal nonnegative push; near the corner both faces compete and the
// smaller feasible push wins. If no finite push restores feasibility the
// step is retried at half the step size, a bounded number of times.
StepOutcome reflect_step(const DomainSpec& domain, const Coefficients& coeffs, const Vector2d& x,
                         double z0, double z1, double h);

struct PathOutcome {
  enum class Terminal { shell_hit, absorbed, timeout };
  Terminal terminal = Terminal::timeout;
  int bin = -1;        // angular bin at the first shell crossing
  double angle = 0.0;  // wrapped angle at the terminal point
  Vector2d end = Vector2d::Zero();
  double elapsed = 0.0;
  double pushes = 0.0;
  long steps = 0;
  long restarts = 0;
};

// Runs until |X| >= target_radius (shell hit) or |X| <= eta (absorbed), with
// the step size scaled per shell band: h in the outer band, (4|x|/target)^2 h
// below, floored at the absorption scale.
PathOutcome simulate_to_shell(const DomainSpec& domain, const Coefficients& coeffs,
                              const Vector2d& x0, double target_radius, const SimParams& params,
                              int m_bins = 16);

// Same dynamics started from rho * g0 with absorptions converted to restarts;
// terminates on the shell hit (or timeout). Restart count reported.
PathOutcome simulate_restarting(const DomainSpec& domain, const Coefficients& coeffs,
                                double target_radius, const SimParams& params, int m_bins = 16);

struct PathSample {
  long step;
  double t;
  double x;
  double y;
  double push;
};

// Recording variant for path dumps; samples every `stride` steps.
PathOutcome simulate_recorded(const DomainSpec& domain, const Coefficients& coeffs,
                              const Vector2d& x0, double target_radius, const SimParams& params,
                              std::vector<PathSample>& out, long stride = 1, int m_bins = 16);

// Empirical shell-to-shell hitting kernel between the angular-bin spaces of
// consecutive shells, with per-entry binomial standard errors.
struct EmpiricalKernel {
  SubKernel kernel;
  MatrixXd counts;
  MatrixXd stderrs;
  VectorXd attempts;  // per row
  VectorXd timeouts;  // per row
  std::string fingerprint;
};

// Q-hat_n: excursions from the bin midpoints of shell n to shell n-1.
// Deterministic in (seed, n); replicate streams make the result independent
// of the worker count. eta_override, when positive, fixes the absorption
// radius (used to keep a common tip proxy across a multi-shell experiment).
EmpiricalKernel estimate_kernel(const DomainSpec& domain, const Coefficients& coeffs,
                                const ShellLadder& ladder, int n, int n_per_bin,
                                const SimScaling& scaling, std::uint64_t seed, int workers = 1,
                                double eta_override = 0.0);

struct SurvivalEstimate {
  double p_hat = 0.0;
  double se = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  long n = 0;
  long survived = 0;
  long absorbed = 0;
  long timeouts = 0;
};

// P(shell hit before absorption) from a fixed start, binomial with Wilson
// interval. eta_override as above.
SurvivalEstimate survival_probability(const DomainSpec& domain, const Coefficients& coeffs,
                                      const Vector2d& x, double delta, const SimScaling& scaling,
                                      std::uint64_t seed, int n_runs, int workers = 1,
                                      double eta_override = 0.0);

struct ExitTimeEstimate {
  double t_hat = 0.0;
  double se = 0.0;
  double mean_restarts = 0.0;
  long n = 0;
  long timeouts = 0;
};

// Mean first-exit time to radius delta for the restarted-from-the-tip process.
ExitTimeEstimate mean_exit_time(const DomainSpec& domain, const Coefficients& coeffs,
                                double delta, const SimScaling& scaling, std::uint64_t seed,
                                int n_runs, int workers = 1);

struct ExitLaw {
  std::vector<double> angles;  // wrapped exit angles of surviving runs
  long absorbed = 0;
  long timeouts = 0;
  long n = 0;
};

// Exit angles at the target radius from a fixed start (no restarts).
ExitLaw exit_law(const DomainSpec& domain, const Coefficients& coeffs, const Vector2d& x0,
                 double target_radius, const SimScaling& scaling, std::uint64_t seed,
                 const std::string& label, int n_runs, int workers = 1);

// Exit law of the shell-n excursion started at the matched point
// 2^(-2n) * delta_star * (cos a0, sin a0); the scale-equivariant step rule
// makes these runs exact rescalings of each other across n.
ExitLaw rescaled_exit_law(const DomainSpec& domain, const Coefficients& coeffs,
                          const ShellLadder& ladder, int n, double start_angle,
                          const SimScaling& scaling, std::uint64_t seed, int n_runs,
                          int workers = 1);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double se_lhs = 0.0;
  double se_rhs = 0.0;
  double combined_se = 0.0;
  std::vector<EmpiricalKernel> kernels;  // Q-hat_{n+1} .. Q-hat_{n+k}
  VectorXd entry_mass;                   // nu-hat_{n+k} (sub-probability)
  long entry_runs = 0;
};

// Ratio identity at desk scale: the direct hitting law of shell n versus the
// kernel-chain ratio fed by the empirical entry law at shell n+k. All runs
// share one absorption radius so every component sees the same killed
// process. Standard errors come from batch means over replicate blocks.
IdentityCheck basic_identity_check(const DomainSpec& domain, const Coefficients& coeffs,
                                   const ShellLadder& ladder, int n, int k, const VectorXd& f,
                                   const SimScaling& scaling, std::uint64_t seed, int n_per_bin,
                                   int n_direct, int batches = 10, int workers = 1);

}  // namespace wedgelab
