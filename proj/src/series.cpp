#include "digtree/series.hpp"

namespace digtree {

std::pair<cplx, cplx> wynn_epsilon(std::span<const cplx> s) {
  // Column-by-column epsilon table: e_{k+1}^{(n)} = e_{k-1}^{(n+1)}
  //   + 1 / (e_k^{(n+1)} - e_k^{(n)}).
  std::vector<cplx> prev(s.size() + 1, 0.0);  // column k-1 (starts at e_{-1} = 0)
  std::vector<cplx> cur(s.begin(), s.end());  // column k
  cplx best = s.back();
  cplx previous = s.size() >= 2 ? s[s.size() - 2] : s.back();
  for (std::size_t k = 0; cur.size() >= 2; ++k) {
    std::vector<cplx> next(cur.size() - 1);
    for (std::size_t n = 0; n + 1 < cur.size(); ++n) {
      const cplx diff = cur[n + 1] - cur[n];
      if (diff == cplx(0.0)) return {cur[n + 1], cur[n + 1]};
      next[n] = prev[n + 1] + 1.0 / diff;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 1 && !cur.empty()) {  // even column reached
      previous = best;
      best = cur.back();
    }
  }
  return {best, previous};
}

}  // namespace digtree
