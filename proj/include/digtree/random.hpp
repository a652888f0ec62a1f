#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace digtree {

/// The single generator used by every simulation: the standard 64-bit
/// Mersenne Twister, whose output sequence is fixed by the C++ standard.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for trial `index` of a run started with `seed`:
///   splitmix64(seed ^ splitmix64(index)).
/// Depends only on (seed, index), so trials can be scheduled on any worker.
constexpr std::uint64_t derive_subseed(std::uint64_t seed,
                                       std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exact Binomial(n, p) variate.
///
/// For n < 64 the draw is by sequential inversion of the CDF from k = 0
/// (one uniform per call). For n >= 64 it delegates to
/// std::binomial_distribution, which in libstdc++ is Devroye's exact
/// rejection algorithm. When p > 1/2 the routine samples n - Bin(n, 1 - p)
/// so that the inversion walk starts from the heavier tail.
std::uint64_t sample_binomial(Rng& rng, std::uint64_t n, double p);

/// Multinomial split of `n` items over `probs` by conditional binomials.
/// `out` must have the same length as `probs`.
void sample_multinomial(Rng& rng, std::uint64_t n, std::span<const double> probs,
                        std::span<std::uint64_t> out);

}  // namespace digtree
