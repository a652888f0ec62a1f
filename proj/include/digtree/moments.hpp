#pragma once

// Exact moments of (S_n, K_n, N_n) from the splitting recurrences.
//
// Derivation (binary trie). Given the first-level split B_n = j the three
// functionals decompose into independent subtree contributions:
//
//   S_n = S_j + S*_{n-j} + 1
//   K_n = K_j + K*_{n-j} + n
//   N_n = (N_j + S_j) + (N*_{n-j} + S*_{n-j})
//
// Write X~ for the per-subtree contribution (S~ = S, K~ = K, N~ = N + S) and
// m_X(j) = E[X_n | B_n = j]. The law of total covariance gives, for any two
// functionals X, Y,
//
//   Cov(X_n, Y_n) = sum_j w_j [Cov(X~_j, Y~_j) + Cov(X~_{n-j}, Y~_{n-j})]
//                 + sum_j w_j (m_X(j) - E X_n)(m_Y(j) - E Y_n),
//
// with w_j = C(n,j) p^j q^(n-j). The outcomes j = 0 and j = n put the whole
// tree into one subtree, so the unknown Cov(X_n, Y_n) reappears on the right
// with total weight p^n + q^n; every other term involves smaller trees or
// moments at n solved earlier (means first; then SS, KK, SK, SN, KN, NN).
// Moving it to the left leaves the divisor
//
//   1 - p^n - q^n = sum_{j=1}^{n-1} w_j,
//
// evaluated as that sum to avoid cancellation. Means follow the same pattern.
// Raw second moments are reported as Var + mean^2.
//
// Symmetric m-ary tries use the marginal Binomial(n, 1/m) for the first sum
// and, for the spread of the conditional mean,
//   Var(sum_i f(I_i)) = m Var f(I_1) + m(m-1) Cov(f(I_1), f(I_2))
// with (I_1, I_2) trinomial; the divisor becomes 1 - m^(1-n).
//
// Bucket DSTs shift the index (X_{n+b} is built from trees of at most n keys)
// so no divisor appears.

#include <optional>
#include <vector>

#include "digtree/matrix2.hpp"
#include "digtree/model.hpp"

namespace digtree {

/// Moments at one n. The *2 and cross fields are raw moments; Var/Cov/rho are
/// filled by corr_series. rho is empty where a variance is <= 1e-12.
struct MomentRow {
  int n = 0;
  double es = 0, ek = 0, en = 0;
  double es2 = 0, ek2 = 0, en2 = 0;
  double esk = 0, esn = 0, ekn = 0;
  double var_s = 0, var_k = 0, var_n = 0;
  double cov_sk = 0, cov_sn = 0, cov_kn = 0;
  std::optional<double> rho_sk, rho_sn, rho_kn;
};

struct MomentTable {
  ModelSpec model;
  int n_max = 0;
  /// False for models where only the S and K series are computed; the N
  /// fields of each row are then zero and must be ignored.
  bool has_npl = true;
  std::vector<MomentRow> rows;  // rows[n], n = 0..n_max

  const MomentRow& at(int n) const;
};

inline constexpr int kBinaryCap = 1 << 14;
inline constexpr int kMaryCap = 1 << 10;

MomentTable moment_table_binary_trie(double p, int n_max, int cap = kBinaryCap);
MomentTable moment_table_bucket_dst(double p, int b, int n_max, int cap = kBinaryCap);
MomentTable moment_table_mary_trie_symmetric(int m, int n_max, int cap = kMaryCap);

/// Dispatches on the model family (binary trie, symmetric m-ary trie or bucket
/// DST); other models throw Error{UnsupportedModel}.
MomentTable moment_table(const ModelSpec& model, int n_max);

/// Recomputes Var/Cov/rho from the raw moment fields.
MomentTable corr_series(MomentTable table);

/// [[Var S_n, Cov(S_n,K_n)], [Cov(S_n,K_n), Var K_n]]; throws
/// Error{NotPositiveDefinite} when the matrix is singular or indefinite.
CovMatrix2 covariance_matrix(const MomentTable& table, int n);

}  // namespace digtree
