#include "digtree/matrix2.hpp"

#include <algorithm>
#include <cmath>

#include "digtree/error.hpp"

namespace digtree {

Mat2 to_mat(const CovMatrix2& m) noexcept { return {{{m.a, m.b}, {m.b, m.c}}}; }

Mat2 multiply(const Mat2& x, const Mat2& y) noexcept {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

Vec2 apply(const CovMatrix2& m, const Vec2& v) noexcept {
  return {m.a * v[0] + m.b * v[1], m.b * v[0] + m.c * v[1]};
}

double norm_inf(const Mat2& m) noexcept {
  return std::max(std::abs(m[0][0]) + std::abs(m[0][1]),
                  std::abs(m[1][0]) + std::abs(m[1][1]));
}

WhiteningMatrix sqrt_spd_2x2(const CovMatrix2& m) {
  const double det = m.det();
  if (!(m.a > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  }
  const double d = std::sqrt(det);
  const double t = std::sqrt(m.a + m.c + 2.0 * d);
  WhiteningMatrix w;
  w.m = m;
  w.sqrt = {(m.a + d) / t, m.b / t, (m.c + d) / t};
  const double s = d * t;
  w.inv_sqrt = {(m.c + d) / s, -m.b / s, (m.a + d) / s};
  return w;
}

}  // namespace digtree
