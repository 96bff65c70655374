#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sparsemnl {

/// Stateless 64-bit finalizer (splitmix64). Besides seeding, this is the
/// documented hash behind sweep cell seeds, see mix_seed().
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive seed combiner:
///   mix_seed(a, b) = splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15)).
/// Chaining mix_seed calls derives independent streams from one base seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

/// Deterministic random source. mt19937_64 has a portable output sequence;
/// the real-valued draws below avoid std::*_distribution (whose algorithms
/// are implementation-defined), so identical seeds give identical results
/// on any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller; consumes exactly two engine draws
  /// per call regardless of the result.
  double normal() {
    constexpr double two_pi = 6.283185307179586476925287;
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Uniform integer in [lo, hi], inclusive; unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Index in [0, n) drawn from the probability vector p (p sums to 1).
  int categorical(const double* p, int n) {
    const double u = uniform01();
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += p[i];
      if (u < cum) return i;
    }
    return n - 1;  // guard against rounding in the cumulative sum
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sparsemnl
