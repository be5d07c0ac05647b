#pragma once

#include <cstdint>
#include <random>

namespace cbr {

// Deterministic RNG for everything seed-dependent. std::mt19937_64 output is
// pinned by the standard; the distribution mappings below are written out by
// hand because std::uniform_*_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double u01() { return double(eng_() >> 11) * (1.0 / 9007199254740992.0); }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(u01() * double(n)) % n;
  }

  // Uniform integer in [lo, hi] inclusive.
  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>(index(std::uint64_t(hi - lo + 1)));
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cbr
