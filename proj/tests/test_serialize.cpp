#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "digtree/error.hpp"
#include "digtree/serialize.hpp"

using namespace digtree;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

CoefficientOptions window(int k) {
  CoefficientOptions o;
  o.k_window = k;
  return o;
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

template <class T>
std::string csv_of(const T& x) {
  std::ostringstream out;
  write_csv(out, x);
  return out.str();
}

}  // namespace

TEST_CASE("format_number round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.0, -7.5e-300, 1e300, 0.9272416035049}) {
    const std::string s = format_number(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("model JSON") {
  for (const auto& m : {ModelSpec::binary_trie(0.3), ModelSpec::mary_trie({0.2, 0.3, 0.5}),
                        ModelSpec::symmetric_patricia(4), ModelSpec::bucket_dst(0.5, 3)}) {
    CHECK(model_from_json(to_json(m)) == m);
  }
  json bad = to_json(ModelSpec::binary_trie(0.5));
  bad["probs"] = {0.5, 0.6};
  CHECK_THROWS_AS(model_from_json(bad), Error);
}

TEST_CASE("moment table CSV and JSON") {
  const MomentTable t = moment_table(ModelSpec::binary_trie(0.5), 8);
  const std::string csv = csv_of(t);
  CHECK(first_line(csv) ==
        "n,ES,EK,EN,ES2,EK2,EN2,ESK,ESN,EKN,VarS,VarK,VarN,CovSK,CovSN,CovKN,rhoSK,rhoSN,rhoKN");
  CHECK(line_count(csv) == 10);
  CHECK(csv.find("\n0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,,,\n") != std::string::npos);
  CHECK(csv.find("\n2,2,4,") != std::string::npos);

  const MomentTable back = moment_table_from_json(json::parse(to_json(t).dump()));
  CHECK(back.model == t.model);
  CHECK(back.has_npl == t.has_npl);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t n = 0; n < t.rows.size(); ++n) {
    CHECK(back.rows[n].var_k == t.rows[n].var_k);
    CHECK(back.rows[n].cov_sn == t.rows[n].cov_sn);
    CHECK(back.rows[n].rho_sk == t.rows[n].rho_sk);
  }
}

TEST_CASE("bucket tables leave the N columns empty") {
  const std::string csv = csv_of(moment_table(ModelSpec::bucket_dst(0.5, 2), 4));
  CHECK(csv.find("\n4,") != std::string::npos);
  const std::string row = csv.substr(csv.find("\n4,") + 1);
  // n,ES,EK,,ES2,EK2,,ESK,,,VarS,VarK,,CovSK,,,rhoSK,,
  CHECK(row.find(",,") != std::string::npos);
}

TEST_CASE("coefficient sets") {
  const auto set = g_coeffs_sym_mary(2, 3, window(4));
  const std::string csv = csv_of(set);
  CHECK(first_line(csv) == "k,re,im,tail_bound,accelerated");
  CHECK(line_count(csv) == 10);
  CHECK(csv.find("\n-4,") != std::string::npos);

  const auto back = coefficient_set_from_json(json::parse(to_json(set).dump()));
  CHECK(back.kind == set.kind);
  CHECK(back.coeffs == set.coeffs);
  CHECK(back.accelerated == set.accelerated);
  CHECK(back.spectrum.lambda == set.spectrum.lambda);

  const auto asym = g2_asym_binary(spectrum({(3.0 - std::sqrt(5.0)) / 2.0, (std::sqrt(5.0) - 1.0) / 2.0}, RationalRatio{2, 1}), window(2));
  const auto asym_back = coefficient_set_from_json(json::parse(to_json(asym).dump()));
  CHECK(asym_back.spectrum.rational == asym.spectrum.rational);
  CHECK(asym_back.coeffs == asym.coeffs);

  json bad = to_json(set);
  bad["kind"] = "nope";
  CHECK_THROWS_AS(coefficient_set_from_json(bad), Error);
}

TEST_CASE("sample sets") {
  const SampleSet s = mc_moments(ModelSpec::symmetric_patricia(2), 16, 40, 5);
  const std::string csv = csv_of(s);
  CHECK(first_line(csv) == "trial,S,K,N");
  CHECK(line_count(csv) == 41);
  CHECK(csv.find("\n0,15,") != std::string::npos);  // binary PATRICIA size is n - 1

  const json j = json::parse(to_json(s).dump());
  CHECK(j.at("summary").at("rho_SK").is_null());
  const SampleSet back = sample_set_from_json(j);
  CHECK(back.samples == s.samples);
  CHECK(back.model == s.model);
  CHECK(back.summary.mean_k.value == s.summary.mean_k.value);
  CHECK_FALSE(back.summary.rho_sk.has_value());
}

TEST_CASE("histograms and normality reports") {
  const auto pts = standard_normal_pairs(2000, 3);
  const Histogram2D h = joint_histogram(pts, 3, 2);
  const std::string csv = csv_of(h);
  CHECK(first_line(csv) == "ix,iy,x_lo,x_hi,y_lo,y_hi,count");
  CHECK(line_count(csv) == 7);
  const Histogram2D back = histogram_from_json(json::parse(to_json(h).dump()));
  CHECK(back.counts == h.counts);
  CHECK(back.x_max == h.x_max);

  const json r = to_json(normality_check(pts));
  CHECK(r.at("ks").contains("critical"));
  CHECK(r.at("passed").is_boolean());
  const json singular = to_json(normality_check(std::vector<Vec2>(1000, Vec2{1.0, 2.0})));
  CHECK(singular.at("mardia").at("b1").is_null());
}
