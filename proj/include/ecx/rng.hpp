#pragma once

#include <cmath>
#include <cstdint>

namespace ecx {

namespace detail {

/// SplitMix64 finalizer (Vigna / Steele et al.). Bijective on uint64.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

/// SplitMix64 generator. The output sequence is fixed by the algorithm
/// alone, so seeded results are identical across platforms and standard
/// libraries. Independent work units (replicates, null samples) draw
/// from substreams derived with stream_seed(), keeping results
/// independent of execution order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  /// Standard normal via Box-Muller. Computes a fresh pair every call and
  /// discards the second member; no hidden state between calls.
  double next_gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Seed for the index-th substream of a master seed.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return detail::mix64(detail::mix64(master) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace ecx
