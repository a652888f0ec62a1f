#include "digtree/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "digtree/error.hpp"

namespace digtree {

namespace {

void check_range(int n_max, int cap) {
  if (n_max < 0) throw Error(ErrorCode::InvalidModel, "n_max must be >= 0");
  if (n_max > cap) {
    throw Error(ErrorCode::CapExceeded, "n_max " + std::to_string(n_max) +
                                            " exceeds the cap " + std::to_string(cap));
  }
}

std::vector<double> log_factorials(int n_max) {
  std::vector<double> lf(static_cast<std::size_t>(n_max) + 1);
  for (int i = 0; i <= n_max; ++i) lf[static_cast<std::size_t>(i)] = std::lgamma(i + 1.0);
  return lf;
}

/// Binomial(n, p) probabilities from log-space terms, renormalized to sum 1.
void binomial_row(int n, double log_p, double log_q, const std::vector<double>& lf,
                  std::vector<double>& w) {
  w.assign(static_cast<std::size_t>(n) + 1, 0.0);
  double peak = -INFINITY;
  for (int j = 0; j <= n; ++j) {
    const double lw = lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(j)] -
                      lf[static_cast<std::size_t>(n - j)] + j * log_p + (n - j) * log_q;
    w[static_cast<std::size_t>(j)] = lw;
    peak = std::max(peak, lw);
  }
  double total = 0.0;
  for (double& x : w) {
    x = std::exp(x - peak);
    total += x;
  }
  for (double& x : w) x /= total;
}

double checked_divisor(double d, int n) {
  if (!(d >= 1e-300)) {
    throw Error(ErrorCode::NumericalBreakdown,
                "self-reference divisor vanished at n = " + std::to_string(n));
  }
  return d;
}

/// Central moments of (S, K, N) by n, before conversion to table rows.
struct Central {
  std::vector<double> ms, mk, mn;
  std::vector<double> ss, kk, sk, sn, kn, nn;

  explicit Central(int n_max) {
    const auto size = static_cast<std::size_t>(n_max) + 1;
    for (auto* v : {&ms, &mk, &mn, &ss, &kk, &sk, &sn, &kn, &nn}) v->assign(size, 0.0);
  }
};

MomentTable to_table(const ModelSpec& model, int n_max, bool has_npl, const Central& c) {
  MomentTable table;
  table.model = model;
  table.n_max = n_max;
  table.has_npl = has_npl;
  table.rows.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    MomentRow& r = table.rows[i];
    r.n = n;
    r.es = c.ms[i];
    r.ek = c.mk[i];
    r.es2 = c.ss[i] + c.ms[i] * c.ms[i];
    r.ek2 = c.kk[i] + c.mk[i] * c.mk[i];
    r.esk = c.sk[i] + c.ms[i] * c.mk[i];
    if (has_npl) {
      r.en = c.mn[i];
      r.en2 = c.nn[i] + c.mn[i] * c.mn[i];
      r.esn = c.sn[i] + c.ms[i] * c.mn[i];
      r.ekn = c.kn[i] + c.mk[i] * c.mn[i];
    }
  }
  return corr_series(std::move(table));
}

}  // namespace

const MomentRow& MomentTable::at(int n) const {
  if (n < 0 || n > n_max) {
    throw Error(ErrorCode::CapExceeded, "n = " + std::to_string(n) + " is outside the table");
  }
  return rows[static_cast<std::size_t>(n)];
}

MomentTable moment_table_binary_trie(double p, int n_max, int cap) {
  const ModelSpec model = ModelSpec::binary_trie(p);
  check_range(n_max, cap);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const auto lf = log_factorials(n_max);

  Central c(n_max);
  std::vector<double> w;
  for (int n = 2; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    binomial_row(n, log_p, log_q, lf, w);
    const double ends = w[0] + w[un];

    double divisor = 0.0;
    double sum_s = 0.0, sum_k = 0.0, sum_n = 0.0;
    for (std::size_t j = 1; j < un; ++j) {
      const std::size_t r = un - j;
      divisor += w[j];
      sum_s += w[j] * (c.ms[j] + c.ms[r]);
      sum_k += w[j] * (c.mk[j] + c.mk[r]);
      sum_n += w[j] * (c.mn[j] + c.ms[j] + c.mn[r] + c.ms[r]);
    }
    divisor = checked_divisor(divisor, n);
    const double ms = (1.0 + sum_s) / divisor;
    const double mk = (static_cast<double>(n) + sum_k) / divisor;
    const double mn = (ends * ms + sum_n) / divisor;
    c.ms[un] = ms;
    c.mk[un] = mk;
    c.mn[un] = mn;

    // Spread of the conditional means over all j (including 0 and n), plus
    // the subtree covariances over the proper splits.
    double a_ss = 0, a_kk = 0, a_sk = 0, a_sn = 0, a_kn = 0, a_nn = 0;
    double t_ss = 0, t_kk = 0, t_sk = 0, t_sn = 0, t_kn = 0, t_nn = 0;
    for (std::size_t j = 0; j <= un; ++j) {
      const std::size_t r = un - j;
      const double ds = c.ms[j] + c.ms[r] + 1.0 - ms;
      const double dk = c.mk[j] + c.mk[r] + static_cast<double>(n) - mk;
      const double dn = c.mn[j] + c.ms[j] + c.mn[r] + c.ms[r] - mn;
      const double wj = w[j];
      a_ss += wj * ds * ds;
      a_kk += wj * dk * dk;
      a_sk += wj * ds * dk;
      a_sn += wj * ds * dn;
      a_kn += wj * dk * dn;
      a_nn += wj * dn * dn;
      if (j == 0 || j == un) continue;
      t_ss += wj * (c.ss[j] + c.ss[r]);
      t_kk += wj * (c.kk[j] + c.kk[r]);
      t_sk += wj * (c.sk[j] + c.sk[r]);
      t_sn += wj * (c.sn[j] + c.ss[j] + c.sn[r] + c.ss[r]);
      t_kn += wj * (c.kn[j] + c.sk[j] + c.kn[r] + c.sk[r]);
      t_nn += wj * (c.nn[j] + 2.0 * c.sn[j] + c.ss[j] + c.nn[r] + 2.0 * c.sn[r] + c.ss[r]);
    }
    c.ss[un] = (t_ss + a_ss) / divisor;
    c.kk[un] = (t_kk + a_kk) / divisor;
    c.sk[un] = (t_sk + a_sk) / divisor;
    c.sn[un] = (ends * c.ss[un] + t_sn + a_sn) / divisor;
    c.kn[un] = (ends * c.sk[un] + t_kn + a_kn) / divisor;
    c.nn[un] = (ends * (2.0 * c.sn[un] + c.ss[un]) + t_nn + a_nn) / divisor;
  }
  return to_table(model, n_max, true, c);
}

MomentTable moment_table_bucket_dst(double p, int b, int n_max, int cap) {
  const ModelSpec model = ModelSpec::bucket_dst(p, b);
  check_range(n_max, cap);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const auto lf = log_factorials(n_max);

  Central c(n_max);
  for (int n = 1; n < std::min(b, n_max + 1); ++n) c.ms[static_cast<std::size_t>(n)] = 1.0;

  std::vector<double> w;
  for (int t = b; t <= n_max; ++t) {
    const int n = t - b;  // keys passed below the root
    const auto un = static_cast<std::size_t>(n);
    binomial_row(n, log_p, log_q, lf, w);
    double ms = 1.0, mk = static_cast<double>(n);
    for (std::size_t j = 0; j <= un; ++j) {
      ms += w[j] * (c.ms[j] + c.ms[un - j]);
      mk += w[j] * (c.mk[j] + c.mk[un - j]);
    }
    double ss = 0, kk = 0, sk = 0;
    for (std::size_t j = 0; j <= un; ++j) {
      const std::size_t r = un - j;
      const double ds = c.ms[j] + c.ms[r] + 1.0 - ms;
      const double dk = c.mk[j] + c.mk[r] + static_cast<double>(n) - mk;
      ss += w[j] * (c.ss[j] + c.ss[r] + ds * ds);
      kk += w[j] * (c.kk[j] + c.kk[r] + dk * dk);
      sk += w[j] * (c.sk[j] + c.sk[r] + ds * dk);
    }
    const auto ut = static_cast<std::size_t>(t);
    c.ms[ut] = ms;
    c.mk[ut] = mk;
    c.ss[ut] = ss;
    c.kk[ut] = kk;
    c.sk[ut] = sk;
  }
  return to_table(model, n_max, false, c);
}

MomentTable moment_table_mary_trie_symmetric(int m, int n_max, int cap) {
  const ModelSpec model = ModelSpec::symmetric_mary_trie(m);
  check_range(n_max, cap);
  const double md = static_cast<double>(m);
  const double log_in = -std::log(md);
  const double log_out = std::log1p(-1.0 / md);
  const double log_rest = m > 2 ? std::log1p(-2.0 / md) : 0.0;
  const auto lf = log_factorials(n_max);

  Central c(n_max);
  std::vector<double> pi, gs, gk, tau_row;
  for (int n = 2; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    binomial_row(n, log_in, log_out, lf, pi);
    const double divisor = checked_divisor(-std::expm1((1.0 - n) * std::log(md)), n);

    double sum_s = 0.0, sum_k = 0.0;
    for (std::size_t j = 0; j < un; ++j) {
      sum_s += pi[j] * c.ms[j];
      sum_k += pi[j] * c.mk[j];
    }
    c.ms[un] = (1.0 + md * sum_s) / divisor;
    c.mk[un] = (static_cast<double>(n) + md * sum_k) / divisor;

    // Centered subtree means f(j) - E f(I_1).
    double bar_s = 0.0, bar_k = 0.0;
    for (std::size_t j = 0; j <= un; ++j) {
      bar_s += pi[j] * c.ms[j];
      bar_k += pi[j] * c.mk[j];
    }
    gs.resize(un + 1);
    gk.resize(un + 1);
    double marg_ss = 0, marg_kk = 0, marg_sk = 0;
    for (std::size_t j = 0; j <= un; ++j) {
      gs[j] = c.ms[j] - bar_s;
      gk[j] = c.mk[j] - bar_k;
      marg_ss += pi[j] * gs[j] * gs[j];
      marg_kk += pi[j] * gk[j] * gk[j];
      marg_sk += pi[j] * gs[j] * gk[j];
    }

    // Cov(f(I_1), g(I_2)) over the trinomial law of the first two subtrees.
    double joint_ss = 0, joint_kk = 0, joint_sk = 0;
    if (m == 2) {
      for (std::size_t j = 0; j <= un; ++j) {
        const std::size_t k = un - j;
        joint_ss += pi[j] * gs[j] * gs[k];
        joint_kk += pi[j] * gk[j] * gk[k];
        joint_sk += pi[j] * gs[j] * gk[k];
      }
    } else {
      double peak = -INFINITY;
      for (std::size_t j = 0; j <= un; ++j) {
        // I_2 given I_1 = j is Binomial(n - j, 1/(m-1)).
        const std::size_t k = (un - j) / static_cast<std::size_t>(m - 1);
        peak = std::max(peak, lf[un] - lf[j] - lf[k] - lf[un - j - k] +
                                  static_cast<double>(j + k) * log_in +
                                  static_cast<double>(un - j - k) * log_rest);
      }
      double total = 0.0;
      for (std::size_t j = 0; j <= un; ++j) {
        const double base = lf[un] - lf[j] + static_cast<double>(j) * log_in - peak;
        double row_ss = 0, row_kk = 0, row_sk = 0;
        for (std::size_t k = 0; k + j <= un; ++k) {
          const std::size_t rest = un - j - k;
          const double tau = std::exp(base - lf[k] - lf[rest] + static_cast<double>(k) * log_in +
                                      static_cast<double>(rest) * log_rest);
          total += tau;
          row_ss += tau * gs[k];
          row_kk += tau * gk[k];
          row_sk += tau * gk[k];
        }
        joint_ss += gs[j] * row_ss;
        joint_kk += gk[j] * row_kk;
        joint_sk += gs[j] * row_sk;
      }
      joint_ss /= total;
      joint_kk /= total;
      joint_sk /= total;
    }

    double t_ss = 0, t_kk = 0, t_sk = 0;
    for (std::size_t j = 0; j < un; ++j) {
      t_ss += pi[j] * c.ss[j];
      t_kk += pi[j] * c.kk[j];
      t_sk += pi[j] * c.sk[j];
    }
    const double pairs = md * (md - 1.0);
    c.ss[un] = (md * t_ss + md * marg_ss + pairs * joint_ss) / divisor;
    c.kk[un] = (md * t_kk + md * marg_kk + pairs * joint_kk) / divisor;
    c.sk[un] = (md * t_sk + md * marg_sk + pairs * joint_sk) / divisor;
  }
  return to_table(model, n_max, false, c);
}

MomentTable moment_table(const ModelSpec& model, int n_max) {
  model.validate();
  switch (model.family) {
    case Family::BinaryTrie: return moment_table_binary_trie(model.probs[0], n_max);
    case Family::MaryTrie:
      if (model.is_symmetric()) {
        return moment_table_mary_trie_symmetric(model.alphabet_size(), n_max);
      }
      if (model.alphabet_size() == 2) {
        MomentTable table = moment_table_binary_trie(model.probs[0], n_max);
        table.model = model;
        return table;
      }
      throw Error(ErrorCode::UnsupportedModel,
                  "exact moments for asymmetric m-ary tries are not available");
    case Family::BucketDST:
      return moment_table_bucket_dst(model.probs[0], model.bucket_capacity, n_max);
    case Family::Patricia:
      throw Error(ErrorCode::UnsupportedModel,
                  "exact moments for PATRICIA tries are not available");
  }
  throw Error(ErrorCode::UnsupportedModel, "unknown model family");
}

MomentTable corr_series(MomentTable table) {
  constexpr double kMinVariance = 1e-12;
  auto rho = [](double cov, double vx, double vy) -> std::optional<double> {
    if (vx > kMinVariance && vy > kMinVariance) return cov / std::sqrt(vx * vy);
    return std::nullopt;
  };
  for (MomentRow& r : table.rows) {
    r.var_s = r.es2 - r.es * r.es;
    r.var_k = r.ek2 - r.ek * r.ek;
    r.cov_sk = r.esk - r.es * r.ek;
    r.rho_sk = rho(r.cov_sk, r.var_s, r.var_k);
    if (table.has_npl) {
      r.var_n = r.en2 - r.en * r.en;
      r.cov_sn = r.esn - r.es * r.en;
      r.cov_kn = r.ekn - r.ek * r.en;
      r.rho_sn = rho(r.cov_sn, r.var_s, r.var_n);
      r.rho_kn = rho(r.cov_kn, r.var_k, r.var_n);
    } else {
      r.var_n = r.cov_sn = r.cov_kn = 0.0;
      r.rho_sn = r.rho_kn = std::nullopt;
    }
  }
  return table;
}

CovMatrix2 covariance_matrix(const MomentTable& table, int n) {
  const MomentRow& r = table.at(n);
  const CovMatrix2 m{r.var_s, r.cov_sk, r.var_k};
  // A relative threshold: at n = 2 the pair is exactly collinear (K = 2S) and
  // rounding alone can leave a det of either sign.
  if (!(m.a > 0.0) || !(m.det() > 1e-12 * m.a * m.c)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "covariance of (S,K) is not positive definite at n = " + std::to_string(n));
  }
  return m;
}

}  // namespace digtree
