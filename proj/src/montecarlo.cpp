#include "digtree/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "digtree/error.hpp"
#include "digtree/random.hpp"

namespace digtree {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double ms = 0, mk = 0, mn = 0;
  double vs = 0, vk = 0, vn = 0;
  double csk = 0, csn = 0, ckn = 0;
};

Moments moments_of(std::span<const ShapeStats> xs) {
  Moments m;
  const auto count = static_cast<double>(xs.size());
  for (const auto& x : xs) {
    m.ms += static_cast<double>(x.size);
    m.mk += static_cast<double>(x.kpl);
    m.mn += static_cast<double>(x.npl);
  }
  m.ms /= count;
  m.mk /= count;
  m.mn /= count;
  for (const auto& x : xs) {
    const double ds = static_cast<double>(x.size) - m.ms;
    const double dk = static_cast<double>(x.kpl) - m.mk;
    const double dn = static_cast<double>(x.npl) - m.mn;
    m.vs += ds * ds;
    m.vk += dk * dk;
    m.vn += dn * dn;
    m.csk += ds * dk;
    m.csn += ds * dn;
    m.ckn += dk * dn;
  }
  const double denom = count - 1.0;
  for (double* v : {&m.vs, &m.vk, &m.vn, &m.csk, &m.csn, &m.ckn}) *v /= denom;
  return m;
}

std::optional<double> correlation(double cov, double va, double vb) {
  if (!(va > 0.0 && vb > 0.0)) return std::nullopt;
  return cov / std::sqrt(va * vb);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard error of a statistic from its per-sample influence values.
class InfluenceSe {
 public:
  void add(double psi) {
    sum_ += psi;
    sum2_ += psi * psi;
  }
  double se(std::size_t count) const {
    const auto n = static_cast<double>(count);
    const double var = std::max(0.0, (sum2_ - sum_ * sum_ / n) / (n - 1.0));
    return std::sqrt(var / n);
  }

 private:
  double sum_ = 0.0, sum2_ = 0.0;
};

}  // namespace

SampleSummary summarize(std::span<const ShapeStats> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "need at least two samples");
  const Moments all = moments_of(samples);
  const auto ra = correlation(all.csk, all.vs, all.vk);
  const auto rb = correlation(all.csn, all.vs, all.vn);
  const auto rc = correlation(all.ckn, all.vk, all.vn);

  // Influence of one sample on mean, variance, covariance and correlation:
  // d, d^2 - v, da db - c, and (da db - c) / sa sb - rho/2 ((da^2 - va)/va + (db^2 - vb)/vb).
  InfluenceSe ms, mk, mn, vs, vk, vn, csk, csn, ckn, rsk, rsn, rkn;
  auto rho_psi = [](double rho, double da, double db, double c, double va, double vb) {
    return (da * db - c) / std::sqrt(va * vb) - 0.5 * rho * ((da * da - va) / va + (db * db - vb) / vb);
  };
  for (const auto& x : samples) {
    const double ds = static_cast<double>(x.size) - all.ms;
    const double dk = static_cast<double>(x.kpl) - all.mk;
    const double dn = static_cast<double>(x.npl) - all.mn;
    ms.add(ds);
    mk.add(dk);
    mn.add(dn);
    vs.add(ds * ds - all.vs);
    vk.add(dk * dk - all.vk);
    vn.add(dn * dn - all.vn);
    csk.add(ds * dk - all.csk);
    csn.add(ds * dn - all.csn);
    ckn.add(dk * dn - all.ckn);
    if (ra) rsk.add(rho_psi(*ra, ds, dk, all.csk, all.vs, all.vk));
    if (rb) rsn.add(rho_psi(*rb, ds, dn, all.csn, all.vs, all.vn));
    if (rc) rkn.add(rho_psi(*rc, dk, dn, all.ckn, all.vk, all.vn));
  }
  const std::size_t count = samples.size();
  auto rho_est = [&](const std::optional<double>& r, const InfluenceSe& se) -> std::optional<Estimate> {
    if (!r) return std::nullopt;
    return Estimate{*r, se.se(count)};
  };

  SampleSummary s;
  s.mean_s = {all.ms, ms.se(count)};
  s.mean_k = {all.mk, mk.se(count)};
  s.mean_n = {all.mn, mn.se(count)};
  s.var_s = {all.vs, vs.se(count)};
  s.var_k = {all.vk, vk.se(count)};
  s.var_n = {all.vn, vn.se(count)};
  s.cov_sk = {all.csk, csk.se(count)};
  s.cov_sn = {all.csn, csn.se(count)};
  s.cov_kn = {all.ckn, ckn.se(count)};
  s.rho_sk = rho_est(ra, rsk);
  s.rho_sn = rho_est(rb, rsn);
  s.rho_kn = rho_est(rc, rkn);
  return s;
}

SampleSet mc_moments(const ModelSpec& model, std::uint64_t n, std::uint64_t trials,
                     std::uint64_t seed, unsigned workers) {
  if (trials < 2) throw Error(ErrorCode::UsageError, "Monte Carlo needs at least two trials");
  SampleSet set;
  set.model = model;
  set.n = n;
  set.trials = trials;
  set.seed = seed;
  set.samples = sample_shapes(model, n, trials, seed, workers);
  set.summary = summarize(set.samples);
  return set;
}

std::vector<Vec2> size_kpl_points(std::span<const ShapeStats> samples) {
  std::vector<Vec2> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({static_cast<double>(s.size), static_cast<double>(s.kpl)});
  return out;
}

Vec2 sample_mean(std::span<const Vec2> points) {
  Vec2 m{0.0, 0.0};
  for (const auto& p : points) {
    m[0] += p[0];
    m[1] += p[1];
  }
  const auto count = static_cast<double>(points.size());
  return {m[0] / count, m[1] / count};
}

CovMatrix2 sample_covariance(std::span<const Vec2> points) {
  if (points.size() < 2) throw Error(ErrorCode::TooFewSamples, "covariance needs two points");
  const Vec2 m = sample_mean(points);
  CovMatrix2 c{0.0, 0.0, 0.0};
  for (const auto& p : points) {
    const double dx = p[0] - m[0];
    const double dy = p[1] - m[1];
    c.a += dx * dx;
    c.b += dx * dy;
    c.c += dy * dy;
  }
  const auto denom = static_cast<double>(points.size() - 1);
  return {c.a / denom, c.b / denom, c.c / denom};
}

WhitenedSample whiten(std::span<const Vec2> points, const CovMatrix2& m, std::optional<Vec2> means) {
  WhitenedSample out;
  out.whitening = sqrt_spd_2x2(m);
  out.exact_centering = means.has_value();
  out.center = means ? *means : sample_mean(points);
  out.points.reserve(points.size());
  for (const auto& p : points) {
    out.points.push_back(apply(out.whitening.inv_sqrt, {p[0] - out.center[0], p[1] - out.center[1]}));
  }
  return out;
}

std::vector<Vec2> standard_normal_pairs(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec2> out(count);
  for (auto& v : out) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    v = {r * std::cos(t), r * std::sin(t)};
  }
  return out;
}

double kolmogorov_statistic(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / count - f, f - static_cast<double>(i) / count});
  }
  return d;
}

double kolmogorov_critical(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

NormalityReport normality_check(std::span<const Vec2> points, const NormalityThresholds& thresholds) {
  if (points.size() < kMinNormalitySamples) {
    throw Error(ErrorCode::TooFewSamples, "normality check needs at least " +
                                              std::to_string(kMinNormalitySamples) + " points");
  }
  NormalityReport r;
  r.count = points.size();
  r.thresholds = thresholds;

  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& p : points) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  r.ks_x = kolmogorov_statistic(std::move(xs));
  r.ks_y = kolmogorov_statistic(std::move(ys));
  r.ks_critical = kolmogorov_critical(points.size(), thresholds.ks_alpha);
  r.ks_pass = r.ks_x < r.ks_critical && r.ks_y < r.ks_critical;

  r.mean = sample_mean(points);
  r.covariance = sample_covariance(points);
  r.cov_deviation = std::max({std::abs(r.covariance.a - 1.0), std::abs(r.covariance.b),
                              std::abs(r.covariance.c - 1.0)});
  r.cov_pass = r.cov_deviation < thresholds.max_cov_deviation;

  // Mardia: standardize by the (biased) sample covariance, then
  //   b1 = sum_{abc} (mean y_a y_b y_c)^2,  b2 = mean |y|^4.
  const double count = static_cast<double>(points.size());
  const double scale = (count - 1.0) / count;
  const CovMatrix2 biased{r.covariance.a * scale, r.covariance.b * scale, r.covariance.c * scale};
  if (!biased.is_positive_definite()) {
    r.mardia_b1 = r.mardia_skew_stat = r.mardia_skew_pvalue = kNaN;
    r.mardia_b2 = r.mardia_kurtosis_z = kNaN;
    return r;
  }
  const CovMatrix2 inv_root = sqrt_spd_2x2(biased).inv_sqrt;
  double t30 = 0, t21 = 0, t12 = 0, t03 = 0, b2 = 0;
  for (const auto& p : points) {
    const Vec2 y = apply(inv_root, {p[0] - r.mean[0], p[1] - r.mean[1]});
    const double x2 = y[0] * y[0];
    const double y2 = y[1] * y[1];
    t30 += x2 * y[0];
    t21 += x2 * y[1];
    t12 += y[0] * y2;
    t03 += y2 * y[1];
    b2 += (x2 + y2) * (x2 + y2);
  }
  t30 /= count;
  t21 /= count;
  t12 /= count;
  t03 /= count;
  // Mixed entries appear 3 times each among the 8 index triples.
  r.mardia_b1 = t30 * t30 + 3.0 * t21 * t21 + 3.0 * t12 * t12 + t03 * t03;
  r.mardia_b2 = b2 / count;
  r.mardia_skew_stat = count * r.mardia_b1 / 6.0;
  // chi-square with 4 degrees of freedom: P(X > x) = e^{-x/2} (1 + x/2).
  r.mardia_skew_pvalue = std::exp(-0.5 * r.mardia_skew_stat) * (1.0 + 0.5 * r.mardia_skew_stat);
  r.mardia_kurtosis_z = (r.mardia_b2 - 8.0) / std::sqrt(64.0 / count);
  r.skew_pass = r.mardia_skew_stat < thresholds.mardia_skew_critical;
  r.kurtosis_pass = std::abs(r.mardia_kurtosis_z) < thresholds.mardia_kurtosis_z;
  return r;
}

std::uint64_t Histogram2D::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram2D joint_histogram(std::span<const Vec2> points, int bins_x, int bins_y) {
  if (bins_x < 2 || bins_y < 2) throw Error(ErrorCode::UsageError, "histogram needs at least 2 bins per axis");
  Histogram2D h;
  h.bins_x = bins_x;
  h.bins_y = bins_y;
  h.counts.assign(static_cast<std::size_t>(bins_x) * static_cast<std::size_t>(bins_y), 0);
  if (points.empty()) return h;
  h.x_min = h.x_max = points[0][0];
  h.y_min = h.y_max = points[0][1];
  for (const auto& p : points) {
    h.x_min = std::min(h.x_min, p[0]);
    h.x_max = std::max(h.x_max, p[0]);
    h.y_min = std::min(h.y_min, p[1]);
    h.y_max = std::max(h.y_max, p[1]);
  }
  auto bin = [](double v, double lo, double hi, int bins) {
    if (!(hi > lo)) return 0;
    const int i = static_cast<int>((v - lo) / (hi - lo) * bins);
    return std::clamp(i, 0, bins - 1);
  };
  for (const auto& p : points) {
    const int i = bin(p[0], h.x_min, h.x_max, bins_x);
    const int j = bin(p[1], h.y_min, h.y_max, bins_y);
    ++h.counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(bins_y) + static_cast<std::size_t>(j)];
  }
  return h;
}

}  // namespace digtree
