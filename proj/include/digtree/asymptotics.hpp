#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "digtree/model.hpp"
#include "digtree/series.hpp"
#include "digtree/special.hpp"

namespace digtree {

/// log p / log q = r / l with gcd(r, l) = 1.
struct RationalRatio {
  int r = 1;
  int l = 1;
  friend bool operator==(const RationalRatio&, const RationalRatio&) = default;
};

struct SpectrumParams {
  std::vector<double> probs;
  double h = 0.0;       // entropy in nats
  double lambda = 0.0;  // VarK ~ lambda * n log n coefficient; 0 iff symmetric
  std::optional<RationalRatio> rational;  // nullopt: irrational, only k = 0 exists
  bool symmetric = false;

  bool periodic() const { return rational.has_value(); }
  /// Throws Error{RationalityRequired} for k != 0 on an irrational spectrum.
  cplx chi(int k) const;
  /// Period of the oscillations in log x. Requires periodic().
  double log_period() const;
};

double entropy(std::span<const double> probs);
/// pq log^2(p/q) / h^3.
double lambda_binary(double p);
/// (sum p_i log^2 p_i - h^2) / h^3; equals lambda_binary for two symbols.
double lambda_general(std::span<const double> probs);

/// Equal probabilities are detected and get chi_k = 2k pi i / log m regardless
/// of `rational`. Otherwise the caller declares rationality (binary only).
SpectrumParams spectrum(std::vector<double> probs,
                        std::optional<RationalRatio> rational = std::nullopt);

enum class CoefficientKind {
  SymBinaryG1, SymBinaryG2, SymBinaryG3,
  SymMaryG1, SymMaryG2, SymMaryG3,
  PatriciaG1, PatriciaG2, PatriciaG3,
  AsymBinaryG2,
};
const char* coefficient_kind_name(CoefficientKind kind);

struct CoefficientOptions {
  int k_window = 10;
  int j_window = 50;
  SeriesPolicy series;
};

struct FourierCoefficientSet {
  CoefficientKind kind{};
  int k_window = 0;
  std::vector<cplx> coeffs;         // index k + k_window
  std::vector<double> tail_bounds;  // same indexing
  std::vector<bool> accelerated;    // ell-series needed epsilon extrapolation
  SpectrumParams spectrum;

  const cplx& at(int k) const { return coeffs.at(static_cast<std::size_t>(k + k_window)); }
  double tail_bound(int k) const { return tail_bounds.at(static_cast<std::size_t>(k + k_window)); }
};

/// Symmetric m-ary trie, which = 1 (VarS), 2 (CovSK), 3 (VarK).
FourierCoefficientSet g_coeffs_sym_mary(int which, int m, const CoefficientOptions& opts = {});
/// Symmetric binary trie through the alternative binary forms (the first
/// term of g1 written as -Gamma(chi-1) chi (chi+1)^2 / 4).
FourierCoefficientSet g_coeffs_sym_binary(int which, const CoefficientOptions& opts = {});
/// Symmetric m-ary PATRICIA trie. For m = 2, g1 and g2 vanish identically.
FourierCoefficientSet g_coeffs_patricia(int which, int m, const CoefficientOptions& opts = {});
/// CovSK coefficients for a binary memoryless source. For an irrational
/// spectrum only k = 0 is produced and the j-convolution is absent.
FourierCoefficientSet g2_asym_binary(const SpectrumParams& spectrum,
                                     const CoefficientOptions& opts = {});

/// Leading (Gamma-prefactor) terms at a generic chi != 0, and their chi -> 0
/// limits. Exposed so the analytic limits can be checked by extrapolation.
namespace leading {
cplx sym_mary(int which, int m, cplx chi);
double sym_mary_limit(int which, int m);
cplx patricia(int which, int m, cplx chi);
double patricia_limit(int which, int m);
cplx asym_binary_g2(double h, cplx chi);
double asym_binary_g2_limit(double h);
}  // namespace leading

/// Re sum_k g_k x^{-chi_k}; g_0 for an irrational spectrum.
/// Throws Error{ImaginaryResidue} if the imaginary part exceeds 1e-10.
double fourier_eval(const FourierCoefficientSet& set, double x);

/// F(x) = F[g2](x) / sqrt(F[g1](x) F[g3](x)) for a symmetric model.
class CorrelationAsymptote {
 public:
  static CorrelationAsymptote trie(int m, const CoefficientOptions& opts = {});
  static CorrelationAsymptote patricia(int m, const CoefficientOptions& opts = {});

  double operator()(double x) const;
  /// g2_0 / sqrt(g1_0 g3_0), the tabulated average correlation.
  double coefficient_ratio() const;
  /// Mean of F over one period in log x, sampled at `samples` points.
  double period_mean(int samples = 1024) const;
  /// (min, max) of F over one period.
  std::pair<double, double> period_range(int samples = 1024) const;

  const FourierCoefficientSet& g(int which) const;
  int base() const { return m_; }

 private:
  CorrelationAsymptote(int m, FourierCoefficientSet g1, FourierCoefficientSet g2,
                       FourierCoefficientSet g3);
  std::vector<double> sample_period(int samples) const;

  int m_;
  FourierCoefficientSet g1_, g2_, g3_;
};

/// Limiting correlation of size and path length at n: F(n) for symmetric
/// tries (any m) and symmetric PATRICIA (m >= 3); 0 for asymmetric binary tries.
/// Throws Error{UnsupportedModel} otherwise.
double rho_asymptotic(const ModelSpec& model, double n, const CoefficientOptions& opts = {});

struct VarianceAsymptote {
  std::optional<double> var_s;   // VarS / n
  std::optional<double> var_k;   // VarK / n, including lambda log n
  double var_k_log_term = 0.0;   // lambda log n alone
  std::optional<double> cov_sk;  // CovSK / n
};

/// Linear-order predictions. Symmetric models get all three; an asymmetric
/// binary trie gets the lambda log n term and CovSK from g2_0 (plus the
/// periodic part when `rational` is declared).
VarianceAsymptote variance_asymptote(const ModelSpec& model, double n,
                                     std::optional<RationalRatio> rational = std::nullopt,
                                     const CoefficientOptions& opts = {});

}  // namespace digtree
