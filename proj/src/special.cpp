#include "digtree/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "digtree/error.hpp"

namespace digtree {

namespace {

// Stirling series coefficients B_2k / (2k (2k - 1)), k = 1..10. After the
// shift to |z| >= 15 the truncation error is below 1e-20.
constexpr std::array<long double, 10> kStirling = {
    1.0L / 12.0L,          -1.0L / 360.0L,   1.0L / 1260.0L,       -1.0L / 1680.0L,
    1.0L / 1188.0L,        -691.0L / 360360.0L, 1.0L / 156.0L,     -3617.0L / 122400.0L,
    43867.0L / 244188.0L,  -174611.0L / 125400.0L,
};
constexpr long double kStirlingMinModulus = 15.0L;

constexpr double kPi = std::numbers::pi;

// Gamma is evaluated through log Gamma, whose imaginary part grows like
// y log y; the phase is carried in long double so that exp() keeps ~1e-15
// relative accuracy out to |Im z| ~ 1e2.
using lcplx = std::complex<long double>;
constexpr long double kPiL = std::numbers::pi_v<long double>;
const long double kHalfLog2PiL = 0.5L * std::log(2.0L * kPiL);

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

lcplx log_gamma_right_l(lcplx z) {
  // log Gamma(z) = log Gamma(z + k) - sum_{j<k} log(z + j); principal logs keep
  // the branch continuous for Re z > 0.
  lcplx shift = 0.0L;
  while (std::abs(z) < kStirlingMinModulus) {
    shift -= std::log(z);
    z += 1.0L;
  }
  const lcplx inv = 1.0L / z;
  const lcplx inv2 = inv * inv;
  lcplx series = 0.0L;
  lcplx power = inv;
  for (long double c : kStirling) {
    series += c * power;
    power *= inv2;
  }
  return shift + (z - 0.5L) * std::log(z) - z + kHalfLog2PiL + series;
}

/// log sin(pi z), avoiding overflow of sin for large |Im z|.
lcplx log_sin_pi(lcplx z) {
  if (std::abs(z.imag()) <= 1.0L) return std::log(std::sin(kPiL * z));
  if (z.imag() < 0.0L) return std::conj(log_sin_pi(std::conj(z)));
  // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), |e^{2 i pi z}| < e^{-2 pi}.
  const lcplx i{0.0L, 1.0L};
  const lcplx small = std::exp(2.0L * i * kPiL * z);
  return -i * kPiL * z + std::log((small - 1.0L) / (2.0L * i));
}

}  // namespace

cplx log_gamma_right(cplx z) { return cplx(log_gamma_right_l(lcplx(z))); }

cplx complex_gamma(cplx z) {
  if (is_pole(z)) {
    throw Error(ErrorCode::PoleAtNonpositiveInteger, "Gamma has a pole at a nonpositive integer");
  }
  const lcplx zl(z);
  if (z.real() >= 0.5) return cplx(std::exp(log_gamma_right_l(zl)));
  // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
  return cplx(std::exp(std::log(kPiL) - log_sin_pi(zl) - log_gamma_right_l(1.0L - zl)));
}

cplx complex_cot(cplx z) {
  if (std::abs(z.imag()) <= 1.0) return std::cos(z) / std::sin(z);
  if (z.imag() < 0.0) return std::conj(complex_cot(std::conj(z)));
  const cplx i{0.0, 1.0};
  const cplx e = std::exp(2.0 * i * z);
  return i * (e + 1.0) / (e - 1.0);
}

cplx complex_digamma(cplx z) {
  if (is_pole(z)) {
    throw Error(ErrorCode::PoleAtNonpositiveInteger, "digamma has a pole at a nonpositive integer");
  }
  if (z.real() < 0.5) {
    // psi(1 - z) - psi(z) = pi cot(pi z)
    return complex_digamma(1.0 - z) - kPi * complex_cot(kPi * z);
  }
  cplx shift = 0.0;
  while (z.real() < 10.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  // Asymptotic series with Bernoulli numbers B_2 .. B_14.
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  constexpr std::array<double, 7> coeff = {
      1.0 / 12.0,   -1.0 / 120.0,        1.0 / 252.0, -1.0 / 240.0,
      1.0 / 132.0,  -691.0 / 32760.0,    1.0 / 12.0,
  };
  cplx series = 0.0;
  cplx power = inv2;
  for (double c : coeff) {
    series += c * power;
    power *= inv2;
  }
  return shift + std::log(z) - 0.5 * inv - series;
}

}  // namespace digtree
