#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wedgelab/errors.hpp"

namespace wedgelab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Absolute tolerance for row-sum and equality checks throughout the kernel algebra.
inline constexpr double kKernelTol = 1e-12;

struct FiniteStateSpace {
  std::vector<std::string> labels;

  FiniteStateSpace() = default;
  explicit FiniteStateSpace(std::vector<std::string> names);
  // Convenience: n states labeled "<prefix>00".."<prefix>NN".
  static FiniteStateSpace indexed(const std::string& prefix, int n);

  int size() const { return int(labels.size()); }
  bool operator==(const FiniteStateSpace&) const = default;
};

// Sub-stochastic transition weights from a source space into a target space.
// Rows index source states, columns target states. Every entry is in [0, 1]
// (tiny excursions are clamped on ingestion), every row sum is <= 1 + tol,
// and at least one row carries positive mass.
class SubKernel {
 public:
  SubKernel(FiniteStateSpace source, FiniteStateSpace target, MatrixXd weights);

  const FiniteStateSpace& source() const { return source_; }
  const FiniteStateSpace& target() const { return target_; }
  const MatrixXd& weights() const { return weights_; }
  int source_size() const { return int(weights_.rows()); }
  int target_size() const { return int(weights_.cols()); }
  VectorXd row_sums() const { return weights_.rowwise().sum(); }

 private:
  FiniteStateSpace source_;
  FiniteStateSpace target_;
  MatrixXd weights_;
};

// Nonnegative mass vector over a finite space; total mass <= 1 + tol.
struct MeasureVec {
  FiniteStateSpace space;
  VectorXd mass;

  MeasureVec(FiniteStateSpace space_, VectorXd mass_);
  static MeasureVec point_mass(const FiniteStateSpace& space, int state);
  static MeasureVec uniform(const FiniteStateSpace& space);

  double total() const { return mass.sum(); }
};

// Ordered kernels Q_1..Q_K, with Q_l mapping E_l into E_{l-1}. Levels are
// 1-based to match that indexing; space(l) returns E_l for l in [0, K].
class ChainSequence {
 public:
  explicit ChainSequence(std::vector<SubKernel> kernels);

  int length() const { return int(kernels_.size()); }
  const SubKernel& kernel(int level) const;
  const FiniteStateSpace& space(int level) const;
  const std::vector<SubKernel>& kernels() const { return kernels_; }

 private:
  std::vector<SubKernel> kernels_;
};

struct ContractionCertificate {
  double c0;    // min/max ratio of survival products, worst level
  double eps0;  // uniform row-overlap lower bound
  double rate;  // 1 - eps0 * c0
  int k;        // horizon
  double bound; // rate^k
};

struct TvBoundTriple {
  double lhs;   // tv distance between two normalized rows
  double rhs1;  // 1 - overlap * min survival(l-1) / max survival(l)
  double rhs2;  // 1 - overlap * min survival(l-1) / max survival(l-1)
};

struct OverlapWitness {
  double value;
  int level;
  int x;
  int x_tilde;
};

struct ErgodicLimit {
  double value;
  int k_used;
  double certified_error;
  double lo;
  double hi;
  ContractionCertificate certificate;
};

// out[x] = sum_y K(x, y) f(y).
VectorXd apply(const SubKernel& kernel, const VectorXd& f);

// Backward survival products s_k = Q_k ... Q_1 1, k = 1..K (index k-1).
std::vector<VectorXd> survival_products(const ChainSequence& chain);

// Doob-normalized probability kernel at the given level:
// P_l(x, y) = Q_l(x, y) s_{l-1}(y) / s_l(x), with s_0 = 1.
SubKernel normalized_kernel(const ChainSequence& chain, int level);

// Common mass of two rows: sum_y min(K(x, y), K(x_tilde, y)).
double overlap(const SubKernel& kernel, int x, int x_tilde);

// Half the l1 distance; equals the supremum over events for equal-mass inputs
// (in particular for the probability rows this engine compares).
double tv_distance(const MeasureVec& mu, const MeasureVec& nu);
double tv_distance(const VectorXd& mu, const VectorXd& nu);

// Evaluates the one-step contraction inequality at a level and state pair;
// lhs <= rhs1 <= rhs2 holds up to kKernelTol.
TvBoundTriple lemma_tv_bound_check(const ChainSequence& chain, int level, int x, int x_tilde);

// min(s_k) / max(s_k); errors when the chain is dead at horizon k.
double condition_c0(const ChainSequence& chain, int k);

// Minimum row overlap over all levels and state pairs.
double condition_eps0(const ChainSequence& chain);
OverlapWitness condition_eps0_witness(const ChainSequence& chain);

// T_k f = (Q_k ... Q_1 f) / (Q_k ... Q_1 1), componentwise over E_k.
VectorXd tk_apply(const ChainSequence& chain, int k, const VectorXd& f);

// <nu, Q_k ... Q_1 f> / <nu, s_k> for an entry law nu on E_k.
double ergodic_ratio(const ChainSequence& chain, int k, const VectorXd& f, const MeasureVec& nu_k);

// Reverse limit C(f): bracket midpoint at the first horizon where the spread
// of T_k f is within tol, plus a certified error (half spread + geometric tail).
ErgodicLimit ergodic_limit(const ChainSequence& chain, const VectorXd& f, double tol);

// Recomputes c0/eps0 from the instance and packages the geometric bound.
ContractionCertificate certify_contraction(const ChainSequence& chain);

// Pushforward mu P of a measure on E_l through a kernel into E_{l-1}.
MeasureVec push_measure(const MeasureVec& mu, const SubKernel& kernel);

struct RandomChainSpec {
  std::vector<int> sizes;       // |E_0| .. |E_K|, K = sizes.size() - 1 kernels
  double mass_floor = 0.3;      // required c0
  double overlap_floor = 0.2;   // required eps0
  std::uint64_t seed = 0;
  int max_attempts = 64;
};

// Seeded generator of chains passing both condition checks at the requested
// floors; the floors are re-verified on the generated instance, never assumed.
ChainSequence random_chain(const RandomChainSpec& spec);

}  // namespace wedgelab
