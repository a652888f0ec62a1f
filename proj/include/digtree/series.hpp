#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "digtree/error.hpp"
#include "digtree/special.hpp"

namespace digtree {

struct SeriesPolicy {
  /// Stop once a term falls below rel_tol times the largest partial sum seen.
  double rel_tol = 1e-16;
  int max_terms = 300;
  /// At the cap, try Wynn's epsilon algorithm on the trailing partial sums
  /// before giving up. Needed for the slowly convergent (and, for g2, only
  /// Abel-summable) PATRICIA series at m = 2.
  bool accelerate = true;
};

struct SeriesResult {
  cplx sum;
  double tail_bound = 0.0;  // magnitude of the last term, or the extrapolation gap
  int terms = 0;
  bool accelerated = false;
};

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// two highest even-column estimates (best first).
std::pair<cplx, cplx> wynn_epsilon(std::span<const cplx> partial_sums);

/// Sums next_term() for successive indices. Terms before `growth` (the index
/// where the Gamma factors stop growing) never trigger the stopping rule.
template <class NextTerm>
SeriesResult sum_series(NextTerm&& next_term, double growth, const SeriesPolicy& policy,
                        const char* what) {
  cplx sum = 0.0;
  double reference = 0.0;
  std::vector<cplx> partials;
  partials.reserve(static_cast<std::size_t>(policy.max_terms));
  for (int i = 0; i < policy.max_terms; ++i) {
    const cplx term = next_term();
    sum += term;
    partials.push_back(sum);
    reference = std::max(reference, std::abs(sum));
    if (i + 1 > growth && std::abs(term) <= policy.rel_tol * reference) {
      return {sum, std::abs(term), i + 1, false};
    }
  }
  if (policy.accelerate && partials.size() >= 25) {
    const std::span<const cplx> tail(partials.data() + partials.size() - 25, 25);
    const auto [best, previous] = wynn_epsilon(tail);
    const double gap = std::abs(best - previous);
    if (std::isfinite(gap) && gap <= 1e-12 * std::max(1.0, std::abs(best))) {
      return {best, gap, policy.max_terms, true};
    }
  }
  throw Error(ErrorCode::SeriesNotConverged,
              std::string(what) + ": series did not converge within " +
                  std::to_string(policy.max_terms) + " terms");
}

}  // namespace digtree
