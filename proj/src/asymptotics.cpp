#include "digtree/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "digtree/error.hpp"

namespace digtree {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLog2 = std::log(2.0);
const cplx kI{0.0, 1.0};

void require_which(int which) {
  if (which < 1 || which > 3) {
    throw Error(ErrorCode::InvalidModel, "coefficient index must be 1, 2 or 3");
  }
}

void require_base(int m) {
  if (m < 2) throw Error(ErrorCode::InvalidModel, "alphabet size must be at least 2");
}

void require_window(const CoefficientOptions& opts) {
  if (opts.k_window < 0 || opts.j_window < 0) {
    throw Error(ErrorCode::UsageError, "coefficient windows must be nonnegative");
  }
}

cplx pow_real(double base, cplx exponent) { return std::exp(exponent * std::log(base)); }

/// 1 / (m^l - 1) without overflow.
double inv_power_minus_one(double m, int l) {
  const double t = std::pow(m, -l);
  return t / (1.0 - t);
}

/// Gamma(chi + 1); chi is purely imaginary or zero here, so no pole.
cplx gamma_shift1(cplx chi) { return complex_gamma(chi + 1.0); }

FourierCoefficientSet make_set(CoefficientKind kind, int k_window, SpectrumParams spec) {
  FourierCoefficientSet set;
  set.kind = kind;
  set.k_window = k_window;
  const auto size = static_cast<std::size_t>(2 * k_window + 1);
  set.coeffs.assign(size, 0.0);
  set.tail_bounds.assign(size, 0.0);
  set.accelerated.assign(size, false);
  set.spectrum = std::move(spec);
  return set;
}

/// Fills k >= 0 by `eval` and the rest by conjugation (F[g] is real).
template <class Eval>
void fill_conjugate(FourierCoefficientSet& set, Eval&& eval) {
  for (int k = 0; k <= set.k_window; ++k) {
    const SeriesResult r = eval(k);
    const auto up = static_cast<std::size_t>(set.k_window + k);
    const auto down = static_cast<std::size_t>(set.k_window - k);
    set.coeffs[up] = r.sum;
    set.tail_bounds[up] = r.tail_bound;
    set.accelerated[up] = r.accelerated;
    set.coeffs[down] = std::conj(set.coeffs[up]);
    set.tail_bounds[down] = r.tail_bound;
    set.accelerated[down] = r.accelerated;
  }
}

// ---- symmetric m-ary trie --------------------------------------------------

SeriesResult sym_mary_series(int which, int m, cplx chi, const SeriesPolicy& policy) {
  const double log_m = std::log(static_cast<double>(m));
  const cplx g1 = gamma_shift1(chi);
  const double growth = std::abs(chi) + 2.0;
  int l = 0;
  if (which == 3) {
    cplx q = g1;  // Gamma(chi + l) / l!
    auto next = [&] {
      ++l;
      if (l > 1) q *= (chi + static_cast<double>(l - 1)) / static_cast<double>(l);
      const double sign = l % 2 == 0 ? 1.0 : -1.0;
      return sign * q * (static_cast<double>(l) * (chi + static_cast<double>(l) - 1.0) - 1.0) *
             inv_power_minus_one(m, l);
    };
    SeriesResult r = sum_series(next, growth, policy, "symmetric trie g3");
    r.sum *= 2.0 / log_m;
    r.tail_bound *= 2.0 / log_m;
    return r;
  }
  cplx rr = 0.5 * g1;  // Gamma(chi + l) / (l + 1)!
  auto next = [&] {
    ++l;
    if (l > 1) rr *= (chi + static_cast<double>(l - 1)) / static_cast<double>(l + 1);
    const double sign = l % 2 == 0 ? 1.0 : -1.0;
    const auto dl = static_cast<double>(l);
    const cplx poly = which == 1 ? dl * (dl * (chi + dl) - 1.0)
                                 : dl * (2.0 * dl + 1.0) * (chi + dl) - (dl + 1.0) * (dl + 1.0);
    return sign * rr * poly * inv_power_minus_one(m, l);
  };
  SeriesResult r = sum_series(next, growth, policy, "symmetric trie series");
  const double scale = (which == 1 ? 2.0 : 1.0) / log_m;
  r.sum *= scale;
  r.tail_bound *= scale;
  return r;
}

// ---- symmetric PATRICIA ----------------------------------------------------

SeriesResult patricia_series(int which, int m, cplx chi, const SeriesPolicy& policy) {
  const double dm = m;
  const double log_m = std::log(dm);
  const double a = 1.0 - 1.0 / dm;
  const cplx a_chi = pow_real(a, -chi);  // a^{-chi}
  const cplx g1 = gamma_shift1(chi);
  const double growth = std::abs(chi) + 2.0;
  int l = 0;
  if (which == 3) {
    cplx t = (chi + 1.0) * g1;  // Gamma(l + chi + 1) / (l - 1)!
    auto next = [&] {
      ++l;
      if (l > 1) t *= (chi + static_cast<double>(l)) / static_cast<double>(l - 1);
      const double sign = l % 2 == 0 ? 1.0 : -1.0;
      return sign * t * inv_power_minus_one(dm, l);
    };
    SeriesResult r = sum_series(next, growth, policy, "PATRICIA g3");
    const cplx scale = 2.0 * pow_real(dm - 1.0, -chi) / log_m;
    r.sum *= scale;
    r.tail_bound *= std::abs(scale);
    return r;
  }
  cplx rr = 0.5 * g1;  // Gamma(chi + l) / (l + 1)!
  auto next = [&] {
    ++l;
    if (l > 1) rr *= (chi + static_cast<double>(l - 1)) / static_cast<double>(l + 1);
    const double sign = l % 2 == 0 ? -1.0 : 1.0;  // (-1)^{l+1}
    const auto dl = static_cast<double>(l);
    const double s = inv_power_minus_one(dm, l);
    // a^{-l} / (m^l - 1) = (m-1)^{-l} / (1 - m^{-l})
    const double a_s = std::pow(dm - 1.0, -l) / (1.0 - std::pow(dm, -l));
    const double a_l = std::pow(a, l);
    if (which == 1) {
      return sign * rr * dl * (1.0 - a_l) * (s - a_chi * a_s);
    }
    return sign * rr * dl *
           ((dl + 1.0) * a_l * s + (chi - 1.0) * a_chi * s - (dl + chi) * a_chi * a_s);
  };
  SeriesResult r = sum_series(next, growth, policy, "PATRICIA series");
  const double scale = (which == 1 ? 2.0 * (dm - 1.0) * (dm - 1.0) : dm - 1.0) / log_m;
  r.sum *= scale;
  r.tail_bound *= scale;
  return r;
}

// ---- asymmetric binary g2 --------------------------------------------------

SeriesResult asym_g2_series(double p, double h, cplx chi, const SeriesPolicy& policy) {
  const double q = 1.0 - p;
  cplx v = 0.5 * gamma_shift1(chi);  // Gamma(chi + l - 1) / l!, from l = 2
  int l = 1;
  auto next = [&] {
    ++l;
    if (l > 2) v *= (chi + static_cast<double>(l - 2)) / static_cast<double>(l);
    const double sign = l % 2 == 0 ? 1.0 : -1.0;
    const auto dl = static_cast<double>(l);
    const double pl = std::pow(p, l);
    const double ql = std::pow(q, l);
    const double ratio = (pl + ql) / (1.0 - pl - ql);
    return sign * ratio * v * (2.0 * dl * dl - 2.0 * dl + 1.0 + chi * (2.0 * dl - 1.0));
  };
  SeriesResult r = sum_series(next, std::abs(chi) + 3.0, policy, "asymmetric g2");
  r.sum /= h;
  r.tail_bound /= h;
  return r;
}

}  // namespace

// ---- spectrum ----------------------------------------------------------------

cplx SpectrumParams::chi(int k) const {
  if (k == 0) return 0.0;
  if (symmetric) {
    return kI * (2.0 * kPi * k / std::log(static_cast<double>(probs.size())));
  }
  if (!rational) {
    throw Error(ErrorCode::RationalityRequired,
                "chi_k for k != 0 needs a declared rational ratio log p / log q");
  }
  return kI * (2.0 * kPi * rational->r * k / std::log(probs[0]));
}

double SpectrumParams::log_period() const {
  if (!periodic()) {
    throw Error(ErrorCode::RationalityRequired, "an irrational spectrum has no period");
  }
  return 2.0 * kPi / std::abs(chi(1).imag());
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) h -= p * std::log(p);
  return h;
}

double lambda_binary(double p) {
  const double q = 1.0 - p;
  const double h = -p * std::log(p) - q * std::log(q);
  const double lr = std::log(p / q);
  return p * q * lr * lr / (h * h * h);
}

double lambda_general(std::span<const double> probs) {
  const double h = entropy(probs);
  double second = 0.0;
  for (double p : probs) second += p * std::log(p) * std::log(p);
  return (second - h * h) / (h * h * h);
}

SpectrumParams spectrum(std::vector<double> probs, std::optional<RationalRatio> rational) {
  if (probs.size() < 2) throw Error(ErrorCode::InvalidProbs, "need at least two probabilities");
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(ErrorCode::InvalidProbs, "probabilities must lie strictly between 0 and 1");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidProbs, "probabilities must sum to 1");
  }
  SpectrumParams s;
  s.probs = std::move(probs);
  s.h = entropy(s.probs);
  const double first = s.probs.front();
  s.symmetric = std::all_of(s.probs.begin(), s.probs.end(),
                            [&](double p) { return std::abs(p - first) <= 1e-15; });
  if (s.symmetric) {
    s.lambda = 0.0;
    s.rational = RationalRatio{1, 1};
    return s;
  }
  s.lambda = s.probs.size() == 2 ? lambda_binary(first) : lambda_general(s.probs);
  if (rational) {
    if (s.probs.size() != 2) {
      throw Error(ErrorCode::InvalidProbs, "a rational ratio is defined for binary sources only");
    }
    const auto [r, l] = *rational;
    if (r <= 0 || l <= 0 || std::gcd(r, l) != 1) {
      throw Error(ErrorCode::InvalidProbs, "rational ratio r:l must be coprime positive integers");
    }
    const double lp = std::log(s.probs[0]);
    const double lq = std::log(s.probs[1]);
    if (std::abs(l * lp - r * lq) > 1e-9 * std::abs(l * lp)) {
      throw Error(ErrorCode::InvalidProbs,
                  "declared ratio " + std::to_string(r) + ":" + std::to_string(l) +
                      " does not match log p / log q");
    }
    s.rational = rational;
  }
  return s;
}

const char* coefficient_kind_name(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::SymBinaryG1: return "sym-binary-g1";
    case CoefficientKind::SymBinaryG2: return "sym-binary-g2";
    case CoefficientKind::SymBinaryG3: return "sym-binary-g3";
    case CoefficientKind::SymMaryG1: return "sym-mary-g1";
    case CoefficientKind::SymMaryG2: return "sym-mary-g2";
    case CoefficientKind::SymMaryG3: return "sym-mary-g3";
    case CoefficientKind::PatriciaG1: return "patricia-g1";
    case CoefficientKind::PatriciaG2: return "patricia-g2";
    case CoefficientKind::PatriciaG3: return "patricia-g3";
    case CoefficientKind::AsymBinaryG2: return "asym-binary-g2";
  }
  return "unknown";
}

// ---- leading terms -----------------------------------------------------------

namespace leading {

// Gamma(chi - 1) = Gamma(chi + 1) / (chi (chi - 1)), Gamma(chi) = Gamma(chi + 1) / chi.

cplx sym_mary(int which, int m, cplx chi) {
  require_which(which);
  const double log_m = std::log(static_cast<double>(m));
  const cplx g1 = gamma_shift1(chi);
  const cplx two = pow_real(2.0, chi + 2.0);
  switch (which) {
    case 1:
      return g1 / (chi * (chi - 1.0)) * (chi - (chi * chi * chi + 2.0 * chi * chi + 5.0 * chi) / two) /
             log_m;
    case 2:
      return g1 / chi * (1.0 - (chi * chi + chi + 4.0) / two) / log_m;
    default:
      return g1 / chi * (1.0 - (chi * chi - chi + 4.0) / two) / log_m;
  }
}

double sym_mary_limit(int which, int m) {
  require_which(which);
  const double log_m = std::log(static_cast<double>(m));
  switch (which) {
    case 1: return 0.25 / log_m;
    case 2: return (kLog2 - 0.25) / log_m;
    default: return (kLog2 + 0.25) / log_m;
  }
}

cplx patricia(int which, int m, cplx chi) {
  require_which(which);
  const double dm = m;
  const double log_m = std::log(dm);
  const double a = 1.0 - 1.0 / dm;
  const double b = 2.0 - 1.0 / dm;
  const cplx g1 = gamma_shift1(chi);
  const cplx a_chi = pow_real(a, -chi);
  const cplx b_chi = pow_real(b, -chi);
  const cplx two = pow_real(2.0, chi);
  switch (which) {
    case 1: {
      const cplx bracket = -1.0 - (dm - 1.0) * (chi + 1.0) / two +
                           a_chi * (1.0 - ((dm - 1.0) * chi + dm + 1.0) / two) +
                           b_chi * (2.0 * (dm - 1.0) * chi + 2.0 * dm);
      return (dm - 1.0) * g1 / (chi * (chi - 1.0)) * bracket / log_m;
    }
    case 2: {
      const cplx bracket = a_chi * (1.0 - ((dm - 1.0) * chi + 2.0) / (2.0 * two)) +
                           b_chi * (dm - 1.0) * (dm - 1.0) * chi / (2.0 * dm - 1.0);
      return g1 / chi * bracket / log_m;
    }
    default: {
      const cplx bracket =
          1.0 + chi / (dm - 1.0) -
          ((dm - 1.0) * chi * chi - (dm - 3.0) * chi + 4.0 * (dm - 1.0)) / ((dm - 1.0) * 4.0 * two);
      return g1 / chi * a_chi * bracket / log_m;
    }
  }
}

double patricia_limit(int which, int m) {
  require_which(which);
  const double dm = m;
  const double log_m = std::log(dm);
  switch (which) {
    case 1: {
      const double slope = dm * (2.0 * kLog2 + std::log(1.0 - 1.0 / dm) - 2.0 * std::log(2.0 - 1.0 / dm));
      return -(dm - 1.0) * slope / log_m;
    }
    case 2:
      return (kLog2 - (dm - 1.0) / 2.0 + (dm - 1.0) * (dm - 1.0) / (2.0 * dm - 1.0)) / log_m;
    default:
      return ((dm + 1.0) / (4.0 * (dm - 1.0)) + kLog2) / log_m;
  }
}

cplx asym_binary_g2(double h, cplx chi) {
  return gamma_shift1(chi) / chi * (1.0 - (chi + 2.0) / pow_real(2.0, chi + 1.0)) / h;
}

double asym_binary_g2_limit(double h) { return (kLog2 - 0.5) / h; }

}  // namespace leading

// ---- coefficient sets ----------------------------------------------------------

FourierCoefficientSet g_coeffs_sym_mary(int which, int m, const CoefficientOptions& opts) {
  require_which(which);
  require_base(m);
  require_window(opts);
  const auto kind = static_cast<CoefficientKind>(static_cast<int>(CoefficientKind::SymMaryG1) + which - 1);
  FourierCoefficientSet set =
      make_set(kind, opts.k_window, spectrum(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)));
  fill_conjugate(set, [&](int k) {
    const cplx chi = set.spectrum.chi(k);
    SeriesResult r = sym_mary_series(which, m, chi, opts.series);
    r.sum += k == 0 ? cplx(leading::sym_mary_limit(which, m)) : leading::sym_mary(which, m, chi);
    return r;
  });
  return set;
}

FourierCoefficientSet g_coeffs_sym_binary(int which, const CoefficientOptions& opts) {
  require_which(which);
  require_window(opts);
  const auto kind =
      static_cast<CoefficientKind>(static_cast<int>(CoefficientKind::SymBinaryG1) + which - 1);
  FourierCoefficientSet set = make_set(kind, opts.k_window, spectrum({0.5, 0.5}));
  fill_conjugate(set, [&](int k) {
    const cplx chi = set.spectrum.chi(k);
    SeriesResult r = sym_mary_series(which, 2, chi, opts.series);
    if (which == 1) {
      // -Gamma(chi - 1) chi (chi + 1)^2 / 4 = -Gamma(chi + 1) (chi + 1)^2 / (4 (chi - 1)),
      // regular at chi = 0.
      r.sum += -gamma_shift1(chi) * (chi + 1.0) * (chi + 1.0) / (4.0 * (chi - 1.0)) / kLog2;
    } else {
      r.sum += k == 0 ? cplx(leading::sym_mary_limit(which, 2)) : leading::sym_mary(which, 2, chi);
    }
    return r;
  });
  return set;
}

FourierCoefficientSet g_coeffs_patricia(int which, int m, const CoefficientOptions& opts) {
  require_which(which);
  require_base(m);
  require_window(opts);
  const auto kind =
      static_cast<CoefficientKind>(static_cast<int>(CoefficientKind::PatriciaG1) + which - 1);
  FourierCoefficientSet set =
      make_set(kind, opts.k_window, spectrum(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)));
  fill_conjugate(set, [&](int k) {
    const cplx chi = set.spectrum.chi(k);
    SeriesResult r = patricia_series(which, m, chi, opts.series);
    r.sum += k == 0 ? cplx(leading::patricia_limit(which, m)) : leading::patricia(which, m, chi);
    return r;
  });
  return set;
}

FourierCoefficientSet g2_asym_binary(const SpectrumParams& spec, const CoefficientOptions& opts) {
  require_window(opts);
  if (spec.probs.size() != 2) {
    throw Error(ErrorCode::InvalidProbs, "g2_asym_binary needs a binary source");
  }
  const int k_window = spec.periodic() ? opts.k_window : 0;
  const int j_window = spec.periodic() ? opts.j_window : 0;
  FourierCoefficientSet set = make_set(CoefficientKind::AsymBinaryG2, k_window, spec);
  const double p = spec.probs[0];
  const double q = spec.probs[1];
  const double h = spec.h;
  const double second = p * std::log(p) * std::log(p) + q * std::log(q) * std::log(q);

  // Gamma(chi_i + 1) for |i| <= k_window + j_window.
  const int span = k_window + j_window;
  std::vector<cplx> gamma1(static_cast<std::size_t>(2 * span + 1));
  for (int i = -span; i <= span; ++i) {
    gamma1[static_cast<std::size_t>(i + span)] = gamma_shift1(spec.chi(i));
  }
  auto g1_at = [&](int i) { return gamma1[static_cast<std::size_t>(i + span)]; };

  fill_conjugate(set, [&](int k) {
    const cplx chi = spec.chi(k);
    SeriesResult r = asym_g2_series(p, h, chi, opts.series);
    r.sum += k == 0 ? cplx(leading::asym_binary_g2_limit(h)) : leading::asym_binary_g2(h, chi);
    // Convolution over j != 0: Gamma(chi_{k-j} + 1) (chi_j - 1) Gamma(chi_j).
    cplx conv = 0.0;
    double edge = 0.0;
    for (int j = -j_window; j <= j_window; ++j) {
      if (j == 0) continue;
      const cplx cj = spec.chi(j);
      const cplx term = g1_at(k - j) * (cj - 1.0) * g1_at(j) / cj;
      conv += term;
      if (std::abs(j) == j_window) edge += std::abs(term);
    }
    r.sum -= conv / (h * h);
    r.tail_bound += edge / (h * h);
    r.sum -= g1_at(k) / (h * h) *
             (kEulerGamma + 1.0 + complex_digamma(chi + 1.0) - second / (2.0 * h));
    return r;
  });
  return set;
}

// ---- periodic functions --------------------------------------------------------

double fourier_eval(const FourierCoefficientSet& set, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::UsageError, "fourier_eval needs a finite positive argument");
  }
  if (!set.spectrum.periodic()) {
    const cplx g0 = set.at(0);
    if (std::abs(g0.imag()) > 1e-10) {
      throw Error(ErrorCode::ImaginaryResidue, "g_0 has a nonzero imaginary part");
    }
    return g0.real();
  }
  const double lx = std::log(x);
  cplx total = 0.0;
  for (int k = -set.k_window; k <= set.k_window; ++k) {
    total += set.at(k) * std::exp(-set.spectrum.chi(k) * lx);
  }
  if (std::abs(total.imag()) > 1e-10) {
    throw Error(ErrorCode::ImaginaryResidue,
                "periodic sum has imaginary part " + std::to_string(total.imag()));
  }
  return total.real();
}

CorrelationAsymptote::CorrelationAsymptote(int m, FourierCoefficientSet g1, FourierCoefficientSet g2,
                                           FourierCoefficientSet g3)
    : m_(m), g1_(std::move(g1)), g2_(std::move(g2)), g3_(std::move(g3)) {}

CorrelationAsymptote CorrelationAsymptote::trie(int m, const CoefficientOptions& opts) {
  return CorrelationAsymptote(m, g_coeffs_sym_mary(1, m, opts), g_coeffs_sym_mary(2, m, opts),
                              g_coeffs_sym_mary(3, m, opts));
}

CorrelationAsymptote CorrelationAsymptote::patricia(int m, const CoefficientOptions& opts) {
  if (m < 3) {
    throw Error(ErrorCode::UnsupportedModel,
                "binary PATRICIA has deterministic size; the correlation is undefined");
  }
  return CorrelationAsymptote(m, g_coeffs_patricia(1, m, opts), g_coeffs_patricia(2, m, opts),
                              g_coeffs_patricia(3, m, opts));
}

double CorrelationAsymptote::operator()(double x) const {
  const double f1 = fourier_eval(g1_, x);
  const double f3 = fourier_eval(g3_, x);
  if (!(f1 > 0.0 && f3 > 0.0)) {
    throw Error(ErrorCode::NumericalBreakdown, "variance coefficients are not positive");
  }
  return fourier_eval(g2_, x) / std::sqrt(f1 * f3);
}

double CorrelationAsymptote::coefficient_ratio() const {
  return g2_.at(0).real() / std::sqrt(g1_.at(0).real() * g3_.at(0).real());
}

std::vector<double> CorrelationAsymptote::sample_period(int samples) const {
  if (samples < 1) throw Error(ErrorCode::UsageError, "need at least one sample");
  const double period = std::log(static_cast<double>(m_));
  std::vector<double> values(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    values[static_cast<std::size_t>(i)] = (*this)(std::exp(period * (1.0 + static_cast<double>(i) / samples)));
  }
  return values;
}

double CorrelationAsymptote::period_mean(int samples) const {
  const auto values = sample_period(samples);
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::pair<double, double> CorrelationAsymptote::period_range(int samples) const {
  const auto values = sample_period(samples);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

const FourierCoefficientSet& CorrelationAsymptote::g(int which) const {
  require_which(which);
  return which == 1 ? g1_ : which == 2 ? g2_ : g3_;
}

// ---- model-level predictions -----------------------------------------------------

namespace {

bool is_trie(const ModelSpec& model) {
  return model.family == Family::BinaryTrie || model.family == Family::MaryTrie;
}

}  // namespace

double rho_asymptotic(const ModelSpec& model, double n, const CoefficientOptions& opts) {
  model.validate();
  if (is_trie(model)) {
    if (model.is_symmetric()) return CorrelationAsymptote::trie(model.alphabet_size(), opts)(n);
    if (model.alphabet_size() == 2) return 0.0;
  }
  if (model.family == Family::Patricia && model.is_symmetric() && model.alphabet_size() >= 3) {
    return CorrelationAsymptote::patricia(model.alphabet_size(), opts)(n);
  }
  throw Error(ErrorCode::UnsupportedModel,
              std::string("no closed-form correlation asymptote for ") +
                  std::string(family_name(model.family)) +
                  (model.is_symmetric() ? "" : " with unequal probabilities"));
}

VarianceAsymptote variance_asymptote(const ModelSpec& model, double n,
                                     std::optional<RationalRatio> rational,
                                     const CoefficientOptions& opts) {
  model.validate();
  const int m = model.alphabet_size();
  VarianceAsymptote out;
  if (model.is_symmetric() && (is_trie(model) || model.family == Family::Patricia)) {
    const bool pat = model.family == Family::Patricia;
    auto coeffs = [&](int which) {
      return pat ? g_coeffs_patricia(which, m, opts) : g_coeffs_sym_mary(which, m, opts);
    };
    out.var_s = fourier_eval(coeffs(1), n);
    out.cov_sk = fourier_eval(coeffs(2), n);
    out.var_k = fourier_eval(coeffs(3), n);
    return out;
  }
  if (is_trie(model) && m == 2) {
    const SpectrumParams spec = spectrum(model.probs, rational);
    out.var_k_log_term = spec.lambda * std::log(n);
    out.cov_sk = fourier_eval(g2_asym_binary(spec, opts), n);
    return out;
  }
  throw Error(ErrorCode::UnsupportedModel,
              std::string("no closed-form variance asymptote for ") +
                  std::string(family_name(model.family)));
}

}  // namespace digtree
