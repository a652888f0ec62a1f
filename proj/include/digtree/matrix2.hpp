#pragma once

#include <array>

namespace digtree {

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct CovMatrix2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double det() const noexcept { return a * c - b * b; }
  bool is_positive_definite() const noexcept { return a > 0.0 && det() > 0.0; }

  static CovMatrix2 identity() noexcept { return {1.0, 0.0, 1.0}; }
  bool operator==(const CovMatrix2&) const = default;
};

/// General 2x2 matrix, row-major.
using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

Mat2 to_mat(const CovMatrix2& m) noexcept;
Mat2 multiply(const Mat2& x, const Mat2& y) noexcept;
Vec2 apply(const CovMatrix2& m, const Vec2& v) noexcept;
/// Max-row-sum norm.
double norm_inf(const Mat2& m) noexcept;

/// A positive-definite covariance together with its unique positive-definite
/// square root and the inverse of that root.
struct WhiteningMatrix {
  CovMatrix2 m;
  CovMatrix2 sqrt;
  CovMatrix2 inv_sqrt;
};

/// Closed-form square root of a 2x2 SPD matrix. With d = sqrt(ac - b^2) and
/// t = sqrt(a + c + 2d):
///   M^{1/2}  = [[a + d, b], [b, c + d]] / t
///   M^{-1/2} = [[c + d, -b], [-b, a + d]] / (d t)
/// Throws Error{NotPositiveDefinite} unless a > 0 and ac - b^2 > 0.
WhiteningMatrix sqrt_spd_2x2(const CovMatrix2& m);

}  // namespace digtree
