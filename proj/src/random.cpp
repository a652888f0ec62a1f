#include "digtree/random.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace digtree {

namespace {

std::uint64_t binomial_inversion(Rng& rng, std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double ratio = p / q;
  double pmf = std::pow(q, static_cast<double>(n));
  double cdf = pmf;
  const double u = uniform01(rng);
  std::uint64_t k = 0;
  while (u >= cdf && k < n) {
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
    ++k;
    cdf += pmf;
  }
  return k;
}

}  // namespace

std::uint64_t sample_binomial(Rng& rng, std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  if (n < 64) return binomial_inversion(rng, n, p);
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(rng);
}

void sample_multinomial(Rng& rng, std::uint64_t n, std::span<const double> probs,
                        std::span<std::uint64_t> out) {
  assert(out.size() == probs.size() && !probs.empty());
  std::uint64_t remaining = n;
  double mass = 1.0;
  const std::size_t last = probs.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    if (remaining == 0) {
      out[i] = 0;
      continue;
    }
    const double conditional = std::clamp(probs[i] / mass, 0.0, 1.0);
    out[i] = sample_binomial(rng, remaining, conditional);
    remaining -= out[i];
    mass -= probs[i];
  }
  out[last] = remaining;
}

}  // namespace digtree
