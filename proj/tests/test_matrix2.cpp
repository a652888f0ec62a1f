#include <doctest.h>

#include <cmath>
#include <random>

#include "digtree/error.hpp"
#include "digtree/matrix2.hpp"

using namespace digtree;

namespace {

double entry_gap(const Mat2& x, const Mat2& y) {
  double g = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g = std::max(g, std::abs(x[i][j] - y[i][j]));
  return g;
}

Mat2 identity() { return to_mat(CovMatrix2::identity()); }

Mat2 minus(const Mat2& x, const Mat2& y) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][j] - y[i][j];
  return r;
}

}  // namespace

TEST_CASE("closed-form square roots") {
  const auto id = sqrt_spd_2x2(CovMatrix2::identity());
  CHECK(entry_gap(to_mat(id.sqrt), identity()) < 1e-15);
  CHECK(entry_gap(to_mat(id.inv_sqrt), identity()) < 1e-15);

  const auto diag = sqrt_spd_2x2({4.0, 0.0, 9.0});
  CHECK(entry_gap(to_mat(diag.sqrt), Mat2{{{2.0, 0.0}, {0.0, 3.0}}}) < 1e-15);
  CHECK(entry_gap(to_mat(diag.inv_sqrt), Mat2{{{0.5, 0.0}, {0.0, 1.0 / 3.0}}}) < 1e-15);

  // [[2,1],[1,2]]: d = sqrt(3), t = sqrt(4 + 2 sqrt 3) = sqrt 3 + 1.
  const auto w = sqrt_spd_2x2({2.0, 1.0, 2.0});
  const double s3 = std::sqrt(3.0);
  const Mat2 want{{{(s3 + 1) / 2, (s3 - 1) / 2}, {(s3 - 1) / 2, (s3 + 1) / 2}}};
  CHECK(entry_gap(to_mat(w.sqrt), want) < 1e-15);
  CHECK(entry_gap(multiply(want, want), Mat2{{{2.0, 1.0}, {1.0, 2.0}}}) < 1e-14);
}

TEST_CASE("non-positive-definite input") {
  for (const CovMatrix2& m : {CovMatrix2{0.0, 0.0, 1.0}, CovMatrix2{1.0, 1.0, 1.0},
                              CovMatrix2{-1.0, 0.0, -1.0}, CovMatrix2{1.0, 2.0, 1.0}}) {
    try {
      sqrt_spd_2x2(m);
      FAIL("expected NotPositiveDefinite");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    }
  }
}

TEST_CASE("random SPD round trips") {
  // Generator: mt19937_64(2024); a, c log-uniform over 1e-3..1e3, b = rho sqrt(ac)
  // with rho uniform in (-0.999, 0.999).
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  std::uniform_real_distribution<double> corr(-0.999, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const double a = std::pow(10.0, log_scale(rng));
    const double c = std::pow(10.0, log_scale(rng));
    const CovMatrix2 m{a, corr(rng) * std::sqrt(a * c), c};
    const auto w = sqrt_spd_2x2(m);
    const Mat2 sq = multiply(to_mat(w.sqrt), to_mat(w.sqrt));
    CHECK(norm_inf(minus(sq, to_mat(m))) / norm_inf(to_mat(m)) < 1e-12);
    CHECK(norm_inf(minus(multiply(to_mat(w.inv_sqrt), to_mat(w.sqrt)), identity())) < 1e-12);
    CHECK(w.sqrt.is_positive_definite());
    CHECK(w.inv_sqrt.is_positive_definite());
  }
}

TEST_CASE("apply") {
  const Vec2 v = apply({2.0, 1.0, 3.0}, {1.0, -1.0});
  CHECK(v[0] == 1.0);
  CHECK(v[1] == -2.0);
}
