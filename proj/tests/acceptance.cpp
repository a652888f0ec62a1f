// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "digtree/asymptotics.hpp"
#include "digtree/error.hpp"
#include "digtree/matrix2.hpp"
#include "digtree/moments.hpp"
#include "digtree/montecarlo.hpp"
#include "digtree/serialize.hpp"

using namespace digtree;

namespace {

/// Accumulates the failing conditions of one criterion.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::string s = notes_;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + ("FAILED " + f);
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string num(double x) { return format_number(x); }

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0) v.require(secs < budget_s, "runtime " + num(secs) + " s over budget " + num(budget_s) + " s");
  if (!v.ok()) ++failures;
  std::printf("criterion %2d: %s  %s (%.2f s) %s\n", id, v.ok() ? "PASS" : "FAIL", title, secs,
              v.summary().c_str());
  std::fflush(stdout);
}

double truncate3(double x) { return std::floor(x * 1000.0) / 1000.0; }

bool within_se(const Estimate& e, double exact, double k = 4.0) { return std::abs(e.value - exact) <= k * e.se; }

/// Upper alpha quantile of the marginal KS statistic under N(0, 1), from
/// `runs` independent standard normal samples of `size` pairs.
double calibrated_ks_critical(std::size_t size, int runs, double alpha) {
  std::vector<double> stats;
  for (int r = 0; r < runs; ++r) {
    const auto pts = standard_normal_pairs(size, 0xCA11B000u + static_cast<std::uint64_t>(r));
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
      xs.push_back(p[0]);
      ys.push_back(p[1]);
    }
    stats.push_back(kolmogorov_statistic(xs));
    stats.push_back(kolmogorov_statistic(ys));
  }
  std::sort(stats.begin(), stats.end());
  const auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(stats.size()))) - 1;
  return stats[idx];
}

}  // namespace

int main() {
  criterion(1, "average correlation of the symmetric binary trie", 1.0, [](Verdict& v) {
    const double r = CorrelationAsymptote::trie(2).coefficient_ratio();
    v.note("ratio " + num(r));
    v.require(std::abs(r - 0.9272416035) < 1e-6, "|ratio - 0.9272416035| < 1e-6");
  });

  criterion(2, "average correlation of symmetric m-ary tries, m = 2..6", 5.0, [](Verdict& v) {
    const double want[] = {0.927, 0.925, 0.924, 0.922, 0.921};
    for (int m = 2; m <= 6; ++m) {
      const double r = CorrelationAsymptote::trie(m).coefficient_ratio();
      v.note("m=" + std::to_string(m) + " " + num(truncate3(r)));
      v.require(std::abs(truncate3(r) - want[m - 2]) < 1e-9, "m=" + std::to_string(m));
    }
  });

  criterion(3, "average correlation of symmetric PATRICIA tries, m = 3..6", 5.0, [](Verdict& v) {
    const double want[] = {0.751, 0.814, 0.841, 0.856};
    for (int m = 3; m <= 6; ++m) {
      const double r = CorrelationAsymptote::patricia(m).coefficient_ratio();
      v.note("m=" + std::to_string(m) + " " + num(truncate3(r)));
      v.require(std::abs(truncate3(r) - want[m - 3]) < 1e-9, "m=" + std::to_string(m));
    }
  });

  criterion(4, "fluctuation amplitude of F over one period", 5.0, [](Verdict& v) {
    const auto [lo, hi] = CorrelationAsymptote::trie(2).period_range(1000);
    v.note("max - min " + num(hi - lo));
    v.require(hi - lo <= 3e-5, "amplitude <= 3e-5");
  });

  criterion(5, "exact vs asymptotic variance constants at n = 4096", 60.0, [](Verdict& v) {
    const int n = 4096;
    const MomentTable t = moment_table_binary_trie(0.5, n);
    const auto f = CorrelationAsymptote::trie(2);
    const auto& row = t.at(n);
    const double exact[] = {row.var_s / n, row.cov_sk / n, row.var_k / n};
    const char* names[] = {"VarS", "CovSK", "VarK"};
    for (int which = 1; which <= 3; ++which) {
      const double asym = fourier_eval(f.g(which), n);
      const double rel = std::abs(exact[which - 1] - asym) / asym;
      v.note(std::string(names[which - 1]) + " rel " + num(rel));
      v.require(rel < 0.01, std::string(names[which - 1]) + " within 1%");
    }
  });

  criterion(6, "exact vs Monte Carlo moments, 1e5 trials", 60.0, [](Verdict& v) {
    const ModelSpec models[] = {ModelSpec::binary_trie(0.3), ModelSpec::binary_trie(0.5),
                                ModelSpec::bucket_dst(0.5, 2), ModelSpec::symmetric_mary_trie(3)};
    const char* labels[] = {"trie p=0.3", "trie p=0.5", "bucket b=2", "3-ary trie"};
    int checks = 0;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int n : {16, 256}) {
        const MomentTable t = moment_table(models[i], n);
        const auto& row = t.at(n);
        const auto mc = mc_moments(models[i], static_cast<std::uint64_t>(n), 100'000, 1000 + 10 * i + n);
        const auto& s = mc.summary;
        std::vector<std::pair<const char*, std::pair<Estimate, double>>> items = {
            {"ES", {s.mean_s, row.es}}, {"EK", {s.mean_k, row.ek}}, {"VarS", {s.var_s, row.var_s}},
            {"VarK", {s.var_k, row.var_k}}, {"CovSK", {s.cov_sk, row.cov_sk}}};
        if (t.has_npl) {
          items.push_back({"EN", {s.mean_n, row.en}});
          items.push_back({"VarN", {s.var_n, row.var_n}});
          items.push_back({"CovSN", {s.cov_sn, row.cov_sn}});
          items.push_back({"CovKN", {s.cov_kn, row.cov_kn}});
        }
        for (const auto& [name, pair] : items) {
          const auto& [est, exact] = pair;
          const double z = std::abs(est.value - exact) / est.se;
          worst = std::max(worst, z);
          ++checks;
          v.require(within_se(est, exact),
                    std::string(labels[i]) + " n=" + std::to_string(n) + " " + name + " z=" + num(z));
        }
      }
    }
    v.note(std::to_string(checks) + " checks, max |z| " + num(worst));
  });

  criterion(7, "correlation decays for a skewed source (p = 0.3)", 0.0, [](Verdict& v) {
    const MomentTable t = moment_table_binary_trie(0.3, 4096);
    const double r512 = *t.at(512).rho_sk, r4096 = *t.at(4096).rho_sk;
    v.note("rho(512) " + num(r512) + ", rho(4096) " + num(r4096));
    v.require(r4096 < r512, "rho(4096) < rho(512)");
  });

  criterion(8, "size and node path length are nearly collinear (p = 0.5)", 0.0, [](Verdict& v) {
    const MomentTable t = moment_table_binary_trie(0.5, 4096);
    const double r = *t.at(4096).rho_sn;
    v.note("rhoSN(4096) " + num(r));
    v.require(r > 0.9, "rhoSN > 0.9");
  });

  criterion(9, "whitened (S, K) is close to a standard bivariate normal", 120.0, [](Verdict& v) {
    const std::size_t trials = 10'000;
    const int n = 4096;
    const double critical = calibrated_ks_critical(trials, 200, 0.01);
    v.note("calibrated KS critical " + num(critical) + " (asymptotic " + num(kolmogorov_critical(trials, 0.01)) + ")");
    for (double p : {0.5, 0.3}) {
      const ModelSpec model = ModelSpec::binary_trie(p);
      const MomentTable t = moment_table(model, n);
      const auto& row = t.at(n);
      const auto mc = mc_moments(model, n, trials, p == 0.5 ? 9001 : 9002);
      const auto pts = size_kpl_points(mc.samples);
      const auto w = whiten(pts, covariance_matrix(t, n), Vec2{row.es, row.ek});
      const NormalityReport r = normality_check(w.points);
      const std::string tag = "p=" + num(p);
      v.note(tag + " cov dev " + num(r.cov_deviation) + ", KS " + num(r.ks_x) + "/" + num(r.ks_y));
      v.require(r.cov_deviation < 0.05, tag + " covariance deviation < 0.05");
      v.require(r.ks_x < critical && r.ks_y < critical, tag + " marginal KS below the critical value");
    }
  });

  criterion(10, "2x2 SPD square root contracts", 0.0, [](Verdict& v) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> log_scale(-3.0, 3.0), corr(-0.999, 0.999);
    double worst_sq = 0.0, worst_inv = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double a = std::pow(10.0, log_scale(rng)), c = std::pow(10.0, log_scale(rng));
      const CovMatrix2 m{a, corr(rng) * std::sqrt(a * c), c};
      const auto w = sqrt_spd_2x2(m);
      Mat2 sq = multiply(to_mat(w.sqrt), to_mat(w.sqrt));
      Mat2 id = multiply(to_mat(w.inv_sqrt), to_mat(w.sqrt));
      const Mat2 mm = to_mat(m);
      for (int r = 0; r < 2; ++r) {
        for (int s = 0; s < 2; ++s) {
          sq[r][s] -= mm[r][s];
          id[r][s] -= r == s ? 1.0 : 0.0;
        }
      }
      worst_sq = std::max(worst_sq, norm_inf(sq) / norm_inf(mm));
      worst_inv = std::max(worst_inv, norm_inf(id));
    }
    v.note("max residuals " + num(worst_sq) + ", " + num(worst_inv));
    v.require(worst_sq < 1e-12, "sqrt^2 = M");
    v.require(worst_inv < 1e-12, "inv_sqrt sqrt = I");
  });

  criterion(11, "coefficient formula cross-validation", 0.0, [](Verdict& v) {
    CoefficientOptions opts;
    opts.k_window = 5;
    double worst_bin = 0.0, worst_asym = 0.0;
    for (int which = 1; which <= 3; ++which) {
      const auto bin = g_coeffs_sym_binary(which, opts);
      const auto mary = g_coeffs_sym_mary(which, 2, opts);
      for (int k = -5; k <= 5; ++k) {
        worst_bin = std::max(worst_bin, std::abs(bin.at(k) - mary.at(k)) / std::max(1.0, std::abs(mary.at(k))));
      }
    }
    const auto asym = g2_asym_binary(spectrum({0.5, 0.5}, RationalRatio{1, 1}), opts);
    const auto sym = g_coeffs_sym_binary(2, opts);
    for (int k = -5; k <= 5; ++k) worst_asym = std::max(worst_asym, std::abs(asym.at(k) - sym.at(k)));
    v.note("binary vs m-ary " + num(worst_bin) + ", skewed form at p=1/2 " + num(worst_asym));
    v.require(worst_bin < 1e-12, "binary forms equal m-ary forms at m = 2");
    v.require(worst_asym < 1e-8, "skewed CovSK coefficients reduce to the symmetric ones");
  });

  criterion(12, "lambda identities", 0.0, [](Verdict& v) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double p = u(rng);
      const double probs[] = {p, 1.0 - p};
      const double a = lambda_binary(p), b = lambda_general(probs);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    const double half[] = {0.5, 0.5};
    v.note("max gap " + num(worst));
    v.require(worst < 1e-12, "closed forms agree");
    v.require(lambda_binary(0.5) == 0.0 && lambda_general(half) == 0.0, "lambda(1/2) == 0");
  });

  criterion(13, "small-n exactness", 0.0, [](Verdict& v) {
    for (double p : {0.5, 0.3, 0.1, 0.85}) {
      const double q = 1.0 - p;
      const MomentTable t = moment_table_binary_trie(p, 3);
      v.require(std::abs(t.at(2).es - 1.0 / (2 * p * q)) < 1e-12 * t.at(2).es, "ES(2) at p=" + num(p));
      v.require(std::abs(t.at(2).ek - 1.0 / (p * q)) < 1e-12 * t.at(2).ek, "EK(2) at p=" + num(p));
    }
    const double es3 = moment_table_binary_trie(0.5, 3).at(3).es;
    v.note("ES(3) at p=1/2 " + num(es3));
    v.require(std::abs(es3 - 10.0 / 3.0) < 1e-12, "ES(3) = 10/3");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
