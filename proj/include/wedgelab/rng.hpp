#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace wedgelab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// xoshiro256++ stream. Streams are derived from (master seed, label, index)
// so every replicate owns an independent, reproducible generator and adding
// a new labeled consumer never perturbs existing streams.
class RngStream {
 public:
  RngStream() : RngStream(0) {}

  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64(sm);
  }

  static RngStream derive(std::uint64_t master, std::string_view label, std::uint64_t index) {
    std::uint64_t sm = master ^ (0x6a09e667f3bcc909ull + fnv1a64(label));
    std::uint64_t base = splitmix64(sm);
    std::uint64_t sm2 = base ^ (index * 0x9E3779B97F4A7C15ull);
    return RngStream(splitmix64(sm2));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller pair; one call consumes exactly two uniforms.
  void normal_pair(double& z0, double& z1) {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  double normal() {
    double z0, z1;
    normal_pair(z0, z1);
    return z0;
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

}  // namespace wedgelab
