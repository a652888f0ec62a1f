#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "digtree/matrix2.hpp"
#include "digtree/model.hpp"

namespace digtree {

/// A point estimate with its standard error. Samples are independent, so the
/// error is the delta-method (influence function) estimate.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct SampleSummary {
  Estimate mean_s, mean_k, mean_n;
  Estimate var_s, var_k, var_n;
  Estimate cov_sk, cov_sn, cov_kn;
  /// Undefined when a variance vanishes (e.g. binary PATRICIA size).
  std::optional<Estimate> rho_sk, rho_sn, rho_kn;
};

/// Unbiased moments over all samples with delta-method standard errors.
SampleSummary summarize(std::span<const ShapeStats> samples);

struct SampleSet {
  ModelSpec model;
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<ShapeStats> samples;  // indexed by trial
  SampleSummary summary;
};

/// Deterministic in (model, n, trials, seed) for any worker count.
SampleSet mc_moments(const ModelSpec& model, std::uint64_t n, std::uint64_t trials,
                     std::uint64_t seed, unsigned workers = 0);

/// (S, K) of every sample.
std::vector<Vec2> size_kpl_points(std::span<const ShapeStats> samples);

Vec2 sample_mean(std::span<const Vec2> points);
/// Unbiased sample covariance.
CovMatrix2 sample_covariance(std::span<const Vec2> points);

struct WhitenedSample {
  WhiteningMatrix whitening;
  Vec2 center{};
  bool exact_centering = false;  // false: centered at the sample mean
  std::vector<Vec2> points;
};

/// inv_sqrt(M) (x - center) for every point. `means` defaults to the sample mean.
WhitenedSample whiten(std::span<const Vec2> points, const CovMatrix2& m,
                      std::optional<Vec2> means = std::nullopt);

/// Independent standard bivariate normal pairs by Box-Muller on mt19937_64.
std::vector<Vec2> standard_normal_pairs(std::size_t count, std::uint64_t seed);

struct NormalityThresholds {
  double ks_alpha = 0.01;
  double max_cov_deviation = 0.05;
  /// chi-square(4) upper 1% point for n b1 / 6.
  double mardia_skew_critical = 13.2767;
  /// two-sided 1% normal point for the kurtosis z-score.
  double mardia_kurtosis_z = 2.5758;
};

inline constexpr std::size_t kMinNormalitySamples = 1000;

struct NormalityReport {
  std::size_t count = 0;
  NormalityThresholds thresholds;
  double ks_x = 0.0, ks_y = 0.0;  // sup |F_emp - Phi| per coordinate
  double ks_critical = 0.0;       // asymptotic Kolmogorov point at ks_alpha
  Vec2 mean{};
  CovMatrix2 covariance;
  double cov_deviation = 0.0;  // max entrywise |cov - I|
  // Mardia statistics; NaN when the sample covariance is singular.
  double mardia_b1 = 0.0, mardia_skew_stat = 0.0, mardia_skew_pvalue = 0.0;
  double mardia_b2 = 0.0, mardia_kurtosis_z = 0.0;
  bool ks_pass = false, cov_pass = false, skew_pass = false, kurtosis_pass = false;

  bool passed() const { return ks_pass && cov_pass && skew_pass && kurtosis_pass; }
};

/// Compares points against N2(0, I). Throws Error{TooFewSamples} below
/// kMinNormalitySamples points.
NormalityReport normality_check(std::span<const Vec2> points,
                                const NormalityThresholds& thresholds = {});

double kolmogorov_statistic(std::vector<double> values);
/// sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double kolmogorov_critical(std::size_t n, double alpha);

struct Histogram2D {
  int bins_x = 0, bins_y = 0;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  std::vector<std::uint64_t> counts;  // row-major in x

  std::uint64_t at(int i, int j) const {
    return counts.at(static_cast<std::size_t>(i) * static_cast<std::size_t>(bins_y) +
                     static_cast<std::size_t>(j));
  }
  std::uint64_t total() const;
};

/// Counts over [min, max] per coordinate; the upper edge falls in the last bin.
/// Throws Error{UsageError} for fewer than 2 bins on an axis.
Histogram2D joint_histogram(std::span<const Vec2> points, int bins_x, int bins_y);

}  // namespace digtree
