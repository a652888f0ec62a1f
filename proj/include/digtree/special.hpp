#pragma once

#include <complex>

namespace digtree {

using cplx = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// log Gamma(z) for Re z >= 1/2 on the branch continuous off the negative
/// real axis (imaginary part not reduced mod 2 pi).
cplx log_gamma_right(cplx z);

/// Gamma(z): Stirling series in long double after shifting to |z| >= 15, with
/// the reflection formula for Re z < 1/2. Relative error ~1e-15 for |Im z| <= 1e2.
/// Throws Error{PoleAtNonpositiveInteger} at z = 0, -1, -2, ...
cplx complex_gamma(cplx z);

/// Digamma psi(z): recurrence shift to |z| large, then the asymptotic series;
/// reflection for Re z < 1/2.
cplx complex_digamma(cplx z);

/// cot(z), stable for large |Im z|.
cplx complex_cot(cplx z);

}  // namespace digtree
