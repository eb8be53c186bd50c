// Acceptance suite: every criterion runs at full scale with pinned seeds and
// tolerances and prints one pass/fail line. Exit status 0 iff all pass.

#include <chrono>
#include <functional>
#include <iostream>
#include <thread>
#include <vector>

#include "wedgelab/report.hpp"
#include "wedgelab/scenarios.hpp"

using namespace wedgelab;

namespace {

constexpr std::uint64_t kSeed = 20240817ull;

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<void(VerificationReport&)> run;
};

}  // namespace

int main() {
  const int workers = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));

  std::vector<Criterion> criteria = {
      {1, "geometric contraction of normalized chains", 10.0,
       [&](VerificationReport& r) { check_contraction_law(r, kSeed, 50, 12, 20, 0.3, 0.2); }},
      {2, "one-step total-variation bound", 5.0,
       [&](VerificationReport& r) { check_tv_bound(r, kSeed, 200, 6); }},
      {3, "entry-law independence of backward ratios", 5.0,
       [&](VerificationReport& r) { check_nu_independence(r, kSeed, 10, 20); }},
      {4, "cone analytics: exponent, harmonicity, flux", 10.0,
       [&](VerificationReport& r) { check_cone_analytics(r, kSeed, 20, 6); }},
      {5, "barrier sign package on the shell grid", 30.0,
       [&](VerificationReport& r) { check_barrier_signs(r, 100); }},
      {6, "corner exponent grows under radial tilts", 1.0,
       [&](VerificationReport& r) { check_alpha_monotonicity(r, kSeed, 10); }},
      {7, "survival toward 1 in the pull-away wedge", 600.0,
       [&](VerificationReport& r) { check_survival(r, kSeed, 10000, workers); }},
      {8, "same-radius survival ratios vs barrier constant", 600.0,
       [&](VerificationReport& r) { check_hitting_ratio(r, kSeed, 8, 10000, workers); }},
      {9, "diffusive exit-time scaling", 300.0,
       [&](VerificationReport& r) { check_exit_time_scaling(r, kSeed, 10000, workers); }},
      {10, "deep-shell convergence to the wedge Brownian law", 900.0,
       [&](VerificationReport& r) { check_scaling_limit(r, kSeed, 10000, workers); }},
      {11, "ratio identity and contraction transfer", 1200.0,
       [&](VerificationReport& r) { check_basic_identity(r, kSeed, 10000, 10000, workers); }},
      {12, "byte reproducibility and worker independence", 900.0,
       [&](VerificationReport& r) { check_determinism(r, kSeed, 10000, 4); }},
  };

  bool all_pass = true;
  for (const auto& c : criteria) {
    VerificationReport rep;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string error;
    try {
      c.run(rep);
      ok = rep.overall_pass();
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = elapsed < c.limit_s;
    bool pass = ok && in_budget;
    all_pass = all_pass && pass;
    std::cout << "[" << (pass ? "PASS" : "FAIL") << "] criterion " << c.id << ": " << c.title
              << "  (" << elapsed << "s / " << c.limit_s << "s budget)";
    if (!error.empty()) std::cout << "  error: " << error;
    if (!in_budget) std::cout << "  over budget";
    std::cout << "\n";
    for (const auto& chk : rep.checks) {
      std::cout << "    [" << (chk.status == CheckStatus::pass ? "ok" : "FAIL") << "] "
                << chk.name << "  measured=" << format17(chk.measured)
                << " bound=" << format17(chk.bound);
      if (!chk.note.empty()) std::cout << "  (" << chk.note << ")";
      std::cout << "\n";
    }
    std::cout.flush();
  }
  std::cout << (all_pass ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL") << "\n";
  return all_pass ? 0 : 1;
}
