#pragma once

#include <cstdint>
#include <cmath>

namespace fpaudit {

// Deterministic 64-bit-seeded generator (splitmix64 stream). The same seed
// always yields the same stream, independent of platform or standard library,
// which is what the repo-wide determinism contract requires. Child generators
// are derived from the base seed, not the evolved state, so child(i) is a
// fixed function of (seed, i).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]; never returns 0 so logarithms are safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. No spare-value caching, so a draw is a
  // pure function of the stream position.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  // Bernoulli(p) draw.
  bool bernoulli(double p) { return uniform() <= p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64 in all
    // uses (index selection), so the bias is < 2^-40.
    return next_u64() % n;
  }

  // Derived child generator; injective in index for a fixed base seed.
  Rng child(std::uint64_t index) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace fpaudit
