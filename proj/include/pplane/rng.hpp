#pragma once

#include <cmath>
#include <cstdint>

namespace pplane {

/// splitmix64 mixing step. Used both as a seed deriver and as the core of
/// RandomStream so that every stream in the project is reproducible from a
/// single run seed without relying on implementation-defined std::
/// distributions.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a child seed from a parent seed and up to three stream tags.
/// Order-independent parallel determinism hangs off this: every concurrent
/// evaluation seeds itself from (run seed, generation, member index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ (b + 0x2545f4914f6cdd1dULL));
  s = splitmix64(s ^ (c + 0x6a09e667f3bcc909ULL));
  return s;
}

/// xoshiro256** generator with explicit bit-to-double conversion.
/// Identical sequences on every platform with IEEE doubles.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) {
    // Seed expansion per the reference implementation recommendation.
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      word = splitmix64(sm);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is always tiny relative to 2^64.
    return next_u64() % n;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; deterministic, no cached spare.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace pplane
