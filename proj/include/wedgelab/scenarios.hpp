#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "wedgelab/config.hpp"
#include "wedgelab/report.hpp"

namespace wedgelab {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failure = 1,
  exit_config_error = 2,
  exit_runtime_error = 3,
};

// Executes the configured scenario, writes report.json / timing.json /
// manifest.json plus scenario artifacts under out_dir, prints the check
// lines, and returns the process exit code.
int run_scenario(const ExperimentConfig& cfg, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override, std::ostream& log);

// Check families. Each appends named checks to the report; sizes are the
// caller's (the acceptance suite runs them at full scale, the verify verb at
// reduced scale). Artifact writers are optional.

// Geometric decay of total-variation distances under the normalized chain.
void check_contraction_law(VerificationReport& rep, std::uint64_t seed, int chains,
                           int max_states, int horizon, double c0_floor, double eps0_floor,
                           ArtifactWriter* art = nullptr);

// One-step bound: brute-force TV against the two closed-form majorants.
void check_tv_bound(VerificationReport& rep, std::uint64_t seed, int pairs, int max_states);

// Entry-law independence of the backward ratios, plus exactness for f = 1.
void check_nu_independence(VerificationReport& rep, std::uint64_t seed, int chains, int horizon);

// Corner exponent table, harmonicity order of the gauge, boundary fluxes.
void check_cone_analytics(VerificationReport& rep, std::uint64_t seed, int alpha_cases,
                          int flux_decades = 6);

// Sign package of the barrier functions on a shell grid (grid x grid points
// per regime), fluxes on both faces, limits at the tip.
void check_barrier_signs(VerificationReport& rep, int grid);

// Strict growth of the corner exponent under the radial tilt sweep.
void check_alpha_monotonicity(VerificationReport& rep, std::uint64_t seed, int specs);

// Survival toward 1 with a shrinking absorption radius (pull-away regime).
void check_survival(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers);

// Same-radius survival ratios against the barrier double-ratio constant.
void check_hitting_ratio(VerificationReport& rep, std::uint64_t seed, int pairs_count,
                         int n_runs, int workers);

// Diffusive scaling of the mean exit time, t(delta)/t(delta/4) near 16.
void check_exit_time_scaling(VerificationReport& rep, std::uint64_t seed, int n_runs,
                             int workers);

// Rescaled deep-shell exit laws against the wedge Brownian law (KS test).
void check_scaling_limit(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers);

// Ratio identity between the direct hitting law and the empirical kernel
// chain, plus the contraction transfer on the measured kernels.
void check_basic_identity(VerificationReport& rep, std::uint64_t seed, int n_per_bin,
                          int n_direct, int workers);

// Byte reproducibility of the kernel-algebra families and worker-count
// independence of the Monte Carlo aggregation.
void check_determinism(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers);

// Reduced-scale Monte Carlo sanity: eta monotonicity, step refinement,
// empirical kernel validity and interchange round trip.
void check_sim_fast(VerificationReport& rep, std::uint64_t seed, int n_runs, int workers);

}  // namespace wedgelab
