#include "wedgelab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "wedgelab/rng.hpp"

namespace wedgelab {

namespace {

std::string fmt_index(int x) {
  std::ostringstream os;
  os << (x < 10 ? "0" : "") << x;
  return os.str();
}

}  // namespace

FiniteStateSpace::FiniteStateSpace(std::vector<std::string> names) : labels(std::move(names)) {
  if (labels.empty()) throw ValidationError("state space must hold at least one state");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw ValidationError("state labels must be distinct");
}

FiniteStateSpace FiniteStateSpace::indexed(const std::string& prefix, int n) {
  if (n < 1) throw ValidationError("state space must hold at least one state");
  std::vector<std::string> names;
  names.reserve(size_t(n));
  for (int i = 0; i < n; ++i) names.push_back(prefix + fmt_index(i));
  return FiniteStateSpace(std::move(names));
}

SubKernel::SubKernel(FiniteStateSpace source, FiniteStateSpace target, MatrixXd weights)
    : source_(std::move(source)), target_(std::move(target)), weights_(std::move(weights)) {
  if (weights_.rows() != source_.size() || weights_.cols() != target_.size())
    throw DimensionError("kernel weights do not match source/target sizes");
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      double w = weights_(i, j);
      if (!std::isfinite(w)) throw ValidationError("kernel weight not finite");
      if (w < -kKernelTol || w > 1.0 + kKernelTol) {
        std::ostringstream os;
        os << "kernel weight out of [0,1] at (" << i << "," << j << "): " << w;
        throw ValidationError(os.str());
      }
      weights_(i, j) = std::clamp(w, 0.0, 1.0);
    }
  }
  VectorXd sums = weights_.rowwise().sum();
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (sums[i] > 1.0 + kKernelTol) {
      std::ostringstream os;
      os << "row " << i << " sums to " << sums[i] << " > 1";
      throw ValidationError(os.str());
    }
  }
  if (sums.maxCoeff() <= 0.0) throw ValidationError("kernel is identically zero");
}

MeasureVec::MeasureVec(FiniteStateSpace space_, VectorXd mass_)
    : space(std::move(space_)), mass(std::move(mass_)) {
  if (mass.size() != space.size()) throw DimensionError("measure does not match its space");
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    if (!std::isfinite(mass[i]) || mass[i] < -kKernelTol)
      throw ValidationError("measure entries must be nonnegative");
    mass[i] = std::max(mass[i], 0.0);
  }
  if (mass.sum() > 1.0 + kKernelTol) throw ValidationError("measure total exceeds 1");
}

MeasureVec MeasureVec::point_mass(const FiniteStateSpace& space, int state) {
  if (state < 0 || state >= space.size()) throw DimensionError("point mass outside space");
  VectorXd m = VectorXd::Zero(space.size());
  m[state] = 1.0;
  return MeasureVec(space, std::move(m));
}

MeasureVec MeasureVec::uniform(const FiniteStateSpace& space) {
  return MeasureVec(space, VectorXd::Constant(space.size(), 1.0 / double(space.size())));
}

ChainSequence::ChainSequence(std::vector<SubKernel> kernels) : kernels_(std::move(kernels)) {
  if (kernels_.empty()) throw ValidationError("chain must hold at least one kernel");
  for (size_t i = 1; i < kernels_.size(); ++i) {
    if (!(kernels_[i].target() == kernels_[i - 1].source())) {
      std::ostringstream os;
      os << "chain spaces incompatible between kernels " << i - 1 << " and " << i;
      throw ValidationError(os.str());
    }
  }
}

const SubKernel& ChainSequence::kernel(int level) const {
  if (level < 1 || level > length()) throw DimensionError("chain level out of range");
  return kernels_[size_t(level - 1)];
}

const FiniteStateSpace& ChainSequence::space(int level) const {
  if (level < 0 || level > length()) throw DimensionError("chain level out of range");
  return level == 0 ? kernels_[0].target() : kernels_[size_t(level - 1)].source();
}

VectorXd apply(const SubKernel& kernel, const VectorXd& f) {
  if (f.size() != kernel.target_size())
    throw DimensionError("function length does not match kernel target space");
  if (!f.allFinite()) throw ValidationError("function must be finite-valued");
  return kernel.weights() * f;
}

std::vector<VectorXd> survival_products(const ChainSequence& chain) {
  std::vector<VectorXd> s;
  s.reserve(size_t(chain.length()));
  VectorXd cur = VectorXd::Ones(chain.space(0).size());
  for (int l = 1; l <= chain.length(); ++l) {
    cur = apply(chain.kernel(l), cur);
    s.push_back(cur);
  }
  return s;
}

SubKernel normalized_kernel(const ChainSequence& chain, int level) {
  const SubKernel& q = chain.kernel(level);
  auto s = survival_products(chain);
  VectorXd prev = level >= 2 ? s[size_t(level - 2)] : VectorXd::Ones(q.target_size());
  const VectorXd& cur = s[size_t(level - 1)];
  MatrixXd p(q.source_size(), q.target_size());
  for (int x = 0; x < q.source_size(); ++x) {
    if (cur[x] <= 0.0) {
      std::ostringstream os;
      os << "chain dies at state " << q.source().labels[size_t(x)] << ", level " << level;
      throw DeadChainError(os.str(), level, x);
    }
    for (int y = 0; y < q.target_size(); ++y)
      p(x, y) = q.weights()(x, y) * prev[y] / cur[x];
  }
  return SubKernel(q.source(), q.target(), std::move(p));
}

double overlap(const SubKernel& kernel, int x, int x_tilde) {
  if (x < 0 || x >= kernel.source_size() || x_tilde < 0 || x_tilde >= kernel.source_size())
    throw DimensionError("overlap states outside source space");
  return kernel.weights().row(x).cwiseMin(kernel.weights().row(x_tilde)).sum();
}

double tv_distance(const VectorXd& mu, const VectorXd& nu) {
  if (mu.size() != nu.size()) throw DimensionError("tv_distance requires a common space");
  return 0.5 * (mu - nu).lpNorm<1>();
}

double tv_distance(const MeasureVec& mu, const MeasureVec& nu) {
  if (!(mu.space == nu.space)) throw DimensionError("tv_distance requires a common space");
  return tv_distance(mu.mass, nu.mass);
}

TvBoundTriple lemma_tv_bound_check(const ChainSequence& chain, int level, int x, int x_tilde) {
  SubKernel p = normalized_kernel(chain, level);
  auto s = survival_products(chain);
  VectorXd prev =
      level >= 2 ? s[size_t(level - 2)] : VectorXd::Ones(chain.space(level - 1).size());
  const VectorXd& cur = s[size_t(level - 1)];
  double eps = overlap(chain.kernel(level), x, x_tilde);
  TvBoundTriple out;
  out.lhs = tv_distance(VectorXd(p.weights().row(x).transpose()),
                        VectorXd(p.weights().row(x_tilde).transpose()));
  out.rhs1 = 1.0 - eps * prev.minCoeff() / cur.maxCoeff();
  out.rhs2 = 1.0 - eps * prev.minCoeff() / prev.maxCoeff();
  return out;
}

double condition_c0(const ChainSequence& chain, int k) {
  if (k < 1 || k > chain.length()) throw DimensionError("horizon out of range");
  auto s = survival_products(chain);
  const VectorXd& sk = s[size_t(k - 1)];
  double hi = sk.maxCoeff();
  if (hi <= 0.0) {
    int state = 0;
    sk.maxCoeff(&state);
    throw DeadChainError("chain is dead at horizon " + std::to_string(k), k, state);
  }
  return sk.minCoeff() / hi;
}

OverlapWitness condition_eps0_witness(const ChainSequence& chain) {
  OverlapWitness best{2.0, -1, -1, -1};
  for (int l = 1; l <= chain.length(); ++l) {
    const SubKernel& q = chain.kernel(l);
    for (int x = 0; x < q.source_size(); ++x) {
      for (int xt = x + 1; xt < q.source_size(); ++xt) {
        double e = overlap(q, x, xt);
        if (e < best.value) best = {e, l, x, xt};
      }
    }
    if (q.source_size() == 1) {
      double e = overlap(q, 0, 0);
      if (e < best.value) best = {e, l, 0, 0};
    }
  }
  return best;
}

double condition_eps0(const ChainSequence& chain) {
  return condition_eps0_witness(chain).value;
}

VectorXd tk_apply(const ChainSequence& chain, int k, const VectorXd& f) {
  if (k < 1 || k > chain.length()) throw DimensionError("horizon out of range");
  if (f.size() != chain.space(0).size())
    throw DimensionError("function length does not match E_0");
  VectorXd num = f;
  VectorXd den = VectorXd::Ones(chain.space(0).size());
  for (int l = 1; l <= k; ++l) {
    num = apply(chain.kernel(l), num);
    den = apply(chain.kernel(l), den);
  }
  VectorXd out(num.size());
  for (Eigen::Index x = 0; x < num.size(); ++x) {
    if (den[x] <= 0.0) {
      std::ostringstream os;
      os << "chain dies at state " << chain.space(k).labels[size_t(x)] << ", level " << k;
      throw DeadChainError(os.str(), k, int(x));
    }
    out[x] = num[x] / den[x];
  }
  return out;
}

double ergodic_ratio(const ChainSequence& chain, int k, const VectorXd& f,
                     const MeasureVec& nu_k) {
  if (k < 1 || k > chain.length()) throw DimensionError("horizon out of range");
  if (!(nu_k.space == chain.space(k))) throw DimensionError("entry law lives on the wrong space");
  VectorXd num = f;
  VectorXd den = VectorXd::Ones(chain.space(0).size());
  for (int l = 1; l <= k; ++l) {
    num = apply(chain.kernel(l), num);
    den = apply(chain.kernel(l), den);
  }
  double d = nu_k.mass.dot(den);
  if (d <= 0.0) throw DeadChainError("initial law charges only dead states", k, -1);
  return nu_k.mass.dot(num) / d;
}

ContractionCertificate certify_contraction(const ChainSequence& chain) {
  double c0 = 1.0;
  for (int k = 1; k <= chain.length(); ++k) c0 = std::min(c0, condition_c0(chain, k));
  double eps0 = condition_eps0(chain);
  double rate = 1.0 - eps0 * c0;
  return {c0, eps0, rate, chain.length(), std::pow(rate, chain.length())};
}

ErgodicLimit ergodic_limit(const ChainSequence& chain, const VectorXd& f, double tol) {
  if (tol < 0.0) throw ValidationError("tolerance must be nonnegative");
  OverlapWitness w = condition_eps0_witness(chain);
  if (w.value <= 0.0) {
    std::ostringstream os;
    os << "overlap bound fails at level " << w.level << " states (" << w.x << "," << w.x_tilde
       << ")";
    throw ConditionViolationError(os.str(), w.level, w.x, w.x_tilde);
  }
  double c0 = 1.0;
  for (int k = 1; k <= chain.length(); ++k) c0 = std::min(c0, condition_c0(chain, k));
  if (c0 <= 0.0) throw ConditionViolationError("survival ratio bound fails", -1, -1, -1);
  double rate = 1.0 - std::min(w.value, 1.0) * std::min(c0, 1.0);

  // T_k f is affine-equivariant, so the tail bound may be centered on f's
  // own midrange; constants then certify an exactly zero error.
  double f_center = 0.5 * (f.maxCoeff() + f.minCoeff());
  double f_dev = 0.5 * (f.maxCoeff() - f.minCoeff());

  VectorXd num = f;
  VectorXd den = VectorXd::Ones(chain.space(0).size());
  double lo = 0.0, hi = 0.0;
  for (int k = 1; k <= chain.length(); ++k) {
    num = apply(chain.kernel(k), num);
    den = apply(chain.kernel(k), den);
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (Eigen::Index x = 0; x < num.size(); ++x) {
      if (den[x] <= 0.0) {
        std::ostringstream os;
        os << "chain dies at state " << chain.space(k).labels[size_t(x)] << ", level " << k;
        throw DeadChainError(os.str(), k, int(x));
      }
      double t = num[x] / den[x];
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    double spread = hi - lo;
    if (spread <= tol) {
      ContractionCertificate cert{c0, w.value, rate, k, std::pow(rate, k)};
      double err = 0.5 * spread + std::pow(rate, k) * f_dev;
      return {0.5 * (lo + hi), k, err, lo, hi, cert};
    }
  }
  std::ostringstream os;
  os << "horizon exhausted at k=" << chain.length() << ", best bracket [" << lo << ", " << hi
     << "]";
  throw HorizonExhaustedError(os.str(), chain.length(), lo, hi);
}

MeasureVec push_measure(const MeasureVec& mu, const SubKernel& kernel) {
  if (!(mu.space == kernel.source())) throw DimensionError("measure space mismatch");
  VectorXd out = kernel.weights().transpose() * mu.mass;
  return MeasureVec(kernel.target(), std::move(out));
}

ChainSequence random_chain(const RandomChainSpec& spec) {
  if (spec.sizes.size() < 2) throw ValidationError("need at least two spaces");
  for (int n : spec.sizes)
    if (n < 1) throw ValidationError("space sizes must be positive");
  if (spec.mass_floor <= 0.0 || spec.mass_floor >= 1.0 || spec.overlap_floor <= 0.0 ||
      spec.overlap_floor >= 1.0)
    throw ValidationError("floors must lie in (0,1)");

  const int levels = int(spec.sizes.size()) - 1;
  // Rows mix a shared base row (guaranteeing overlap) with per-state noise;
  // the achieved floors are re-checked on the instance below.
  double target_eps = std::min(0.995, spec.overlap_floor + 0.15 * (1.0 - spec.overlap_floor));
  double c_hi = std::min(0.999, std::max(0.7, target_eps + 0.02));
  double shared = std::min(1.0, target_eps / c_hi);
  double mass_span = 0.25 * (1.0 - spec.mass_floor);

  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    RngStream rng = RngStream::derive(spec.seed, "random_chain", std::uint64_t(attempt));
    std::vector<SubKernel> kernels;
    kernels.reserve(size_t(levels));
    bool ok = true;
    for (int l = 1; l <= levels && ok; ++l) {
      int rows = spec.sizes[size_t(l)];
      int cols = spec.sizes[size_t(l - 1)];
      VectorXd base(cols);
      for (int j = 0; j < cols; ++j) base[j] = 0.2 + rng.uniform();
      base /= base.sum();
      MatrixXd w(rows, cols);
      for (int i = 0; i < rows; ++i) {
        double mass = c_hi * (1.0 - mass_span * rng.uniform());
        VectorXd noise(cols);
        for (int j = 0; j < cols; ++j) noise[j] = 0.05 + rng.uniform();
        noise /= noise.sum();
        w.row(i) = mass * (shared * base + (1.0 - shared) * noise).transpose();
      }
      try {
        kernels.emplace_back(FiniteStateSpace::indexed("L" + std::to_string(l) + "s", rows),
                             FiniteStateSpace::indexed("L" + std::to_string(l - 1) + "s", cols),
                             std::move(w));
      } catch (const ValidationError&) {
        ok = false;
      }
    }
    if (!ok) continue;
    ChainSequence chain(std::move(kernels));
    bool pass = condition_eps0(chain) >= spec.overlap_floor;
    for (int k = 1; k <= levels && pass; ++k)
      pass = condition_c0(chain, k) >= spec.mass_floor;
    if (pass) return chain;
  }
  throw RejectionBudgetError("random_chain: rejection budget exhausted for requested floors");
}

}  // namespace wedgelab
