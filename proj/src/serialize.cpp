#include "digtree/serialize.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "digtree/error.hpp"

namespace digtree {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string opt_csv(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json estimate_json(const Estimate& e) { return {{"value", number_or_null(e.value)}, {"se", number_or_null(e.se)}}; }

json opt_estimate_json(const std::optional<Estimate>& e) { return e ? estimate_json(*e) : json(nullptr); }

Estimate estimate_from(const json& j) { return {number_from(j.at("value")), number_from(j.at("se"))}; }

std::optional<Estimate> opt_estimate_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return estimate_from(j);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json to_json(const ModelSpec& model) {
  json j = {{"family", std::string(family_name(model.family))}, {"probs", model.probs}};
  if (model.family == Family::BucketDST) j["bucket_capacity"] = model.bucket_capacity;
  return j;
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  m.family = parse_family(j.at("family").get<std::string>());
  m.probs = j.at("probs").get<std::vector<double>>();
  m.bucket_capacity = j.value("bucket_capacity", 0);
  m.validate();
  return m;
}

// ---- moment tables ---------------------------------------------------------

void write_csv(std::ostream& out, const MomentTable& t) {
  out << "n,ES,EK,EN,ES2,EK2,EN2,ESK,ESN,EKN,VarS,VarK,VarN,CovSK,CovSN,CovKN,rhoSK,rhoSN,rhoKN\n";
  for (const auto& r : t.rows) {
    auto npl = [&](double v) { return t.has_npl ? format_number(v) : std::string(); };
    auto npl_opt = [&](const std::optional<double>& v) { return t.has_npl ? opt_csv(v) : std::string(); };
    out << r.n << ',' << format_number(r.es) << ',' << format_number(r.ek) << ',' << npl(r.en) << ','
        << format_number(r.es2) << ',' << format_number(r.ek2) << ',' << npl(r.en2) << ','
        << format_number(r.esk) << ',' << npl(r.esn) << ',' << npl(r.ekn) << ','
        << format_number(r.var_s) << ',' << format_number(r.var_k) << ',' << npl(r.var_n) << ','
        << format_number(r.cov_sk) << ',' << npl(r.cov_sn) << ',' << npl(r.cov_kn) << ','
        << opt_csv(r.rho_sk) << ',' << npl_opt(r.rho_sn) << ',' << npl_opt(r.rho_kn) << '\n';
  }
}

json to_json(const MomentTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n},
                    {"ES", r.es}, {"EK", r.ek}, {"EN", r.en},
                    {"ES2", r.es2}, {"EK2", r.ek2}, {"EN2", r.en2},
                    {"ESK", r.esk}, {"ESN", r.esn}, {"EKN", r.ekn},
                    {"VarS", r.var_s}, {"VarK", r.var_k}, {"VarN", r.var_n},
                    {"CovSK", r.cov_sk}, {"CovSN", r.cov_sn}, {"CovKN", r.cov_kn},
                    {"rhoSK", opt(r.rho_sk)}, {"rhoSN", opt(r.rho_sn)}, {"rhoKN", opt(r.rho_kn)}});
  }
  return {{"model", to_json(t.model)}, {"n_max", t.n_max}, {"has_npl", t.has_npl}, {"rows", rows}};
}

MomentTable moment_table_from_json(const json& j) {
  MomentTable t;
  t.model = model_from_json(j.at("model"));
  t.n_max = j.at("n_max").get<int>();
  t.has_npl = j.at("has_npl").get<bool>();
  for (const auto& r : j.at("rows")) {
    MomentRow row;
    row.n = r.at("n").get<int>();
    row.es = r.at("ES");
    row.ek = r.at("EK");
    row.en = r.at("EN");
    row.es2 = r.at("ES2");
    row.ek2 = r.at("EK2");
    row.en2 = r.at("EN2");
    row.esk = r.at("ESK");
    row.esn = r.at("ESN");
    row.ekn = r.at("EKN");
    row.var_s = r.at("VarS");
    row.var_k = r.at("VarK");
    row.var_n = r.at("VarN");
    row.cov_sk = r.at("CovSK");
    row.cov_sn = r.at("CovSN");
    row.cov_kn = r.at("CovKN");
    row.rho_sk = opt_from(r.at("rhoSK"));
    row.rho_sn = opt_from(r.at("rhoSN"));
    row.rho_kn = opt_from(r.at("rhoKN"));
    t.rows.push_back(row);
  }
  return t;
}

// ---- Fourier coefficients ----------------------------------------------------

void write_csv(std::ostream& out, const FourierCoefficientSet& s) {
  out << "k,re,im,tail_bound,accelerated\n";
  for (int k = -s.k_window; k <= s.k_window; ++k) {
    const auto i = static_cast<std::size_t>(k + s.k_window);
    out << k << ',' << format_number(s.coeffs[i].real()) << ',' << format_number(s.coeffs[i].imag())
        << ',' << format_number(s.tail_bounds[i]) << ',' << (s.accelerated[i] ? 1 : 0) << '\n';
  }
}

json to_json(const FourierCoefficientSet& s) {
  json coeffs = json::array();
  for (int k = -s.k_window; k <= s.k_window; ++k) {
    const auto i = static_cast<std::size_t>(k + s.k_window);
    coeffs.push_back({{"k", k},
                      {"re", s.coeffs[i].real()},
                      {"im", s.coeffs[i].imag()},
                      {"tail_bound", s.tail_bounds[i]},
                      {"accelerated", static_cast<bool>(s.accelerated[i])}});
  }
  json spectrum = {{"probs", s.spectrum.probs},
                   {"h", s.spectrum.h},
                   {"lambda", s.spectrum.lambda},
                   {"symmetric", s.spectrum.symmetric}};
  if (s.spectrum.rational) {
    spectrum["rational"] = {{"r", s.spectrum.rational->r}, {"l", s.spectrum.rational->l}};
  } else {
    spectrum["rational"] = nullptr;
  }
  return {{"kind", coefficient_kind_name(s.kind)},
          {"k_window", s.k_window},
          {"spectrum", spectrum},
          {"coefficients", coeffs}};
}

FourierCoefficientSet coefficient_set_from_json(const json& j) {
  FourierCoefficientSet s;
  const auto name = j.at("kind").get<std::string>();
  bool found = false;
  for (int i = 0; i <= static_cast<int>(CoefficientKind::AsymBinaryG2); ++i) {
    if (name == coefficient_kind_name(static_cast<CoefficientKind>(i))) {
      s.kind = static_cast<CoefficientKind>(i);
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::UsageError, "unknown coefficient kind '" + name + "'");
  s.k_window = j.at("k_window").get<int>();
  const auto& sp = j.at("spectrum");
  std::optional<RationalRatio> rational;
  if (!sp.at("rational").is_null()) {
    rational = RationalRatio{sp.at("rational").at("r").get<int>(), sp.at("rational").at("l").get<int>()};
  }
  s.spectrum = spectrum(sp.at("probs").get<std::vector<double>>(), rational);
  for (const auto& c : j.at("coefficients")) {
    s.coeffs.emplace_back(c.at("re").get<double>(), c.at("im").get<double>());
    s.tail_bounds.push_back(c.at("tail_bound").get<double>());
    s.accelerated.push_back(c.at("accelerated").get<bool>());
  }
  if (s.coeffs.size() != static_cast<std::size_t>(2 * s.k_window + 1)) {
    throw Error(ErrorCode::UsageError, "coefficient count does not match k_window");
  }
  return s;
}

// ---- samples -------------------------------------------------------------------

void write_csv(std::ostream& out, const SampleSet& s) {
  out << "trial,S,K,N\n";
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const auto& x = s.samples[i];
    out << i << ',' << x.size << ',' << x.kpl << ',' << x.npl << '\n';
  }
}

json to_json(const SampleSummary& m) {
  return {{"mean_S", estimate_json(m.mean_s)}, {"mean_K", estimate_json(m.mean_k)},
          {"mean_N", estimate_json(m.mean_n)}, {"var_S", estimate_json(m.var_s)},
          {"var_K", estimate_json(m.var_k)},   {"var_N", estimate_json(m.var_n)},
          {"cov_SK", estimate_json(m.cov_sk)}, {"cov_SN", estimate_json(m.cov_sn)},
          {"cov_KN", estimate_json(m.cov_kn)}, {"rho_SK", opt_estimate_json(m.rho_sk)},
          {"rho_SN", opt_estimate_json(m.rho_sn)}, {"rho_KN", opt_estimate_json(m.rho_kn)}};
}

json to_json(const SampleSet& s) {
  json samples = json::array();
  for (const auto& x : s.samples) samples.push_back({x.size, x.kpl, x.npl});
  return {{"model", to_json(s.model)}, {"n", s.n},
          {"trials", s.trials},        {"seed", s.seed},
          {"se_method", "influence"}, {"summary", to_json(s.summary)},
          {"samples", samples}};
}

SampleSet sample_set_from_json(const json& j) {
  SampleSet s;
  s.model = model_from_json(j.at("model"));
  s.n = j.at("n").get<std::uint64_t>();
  s.trials = j.at("trials").get<std::uint64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& x : j.at("samples")) {
    s.samples.push_back({x.at(0).get<std::uint64_t>(), x.at(1).get<std::uint64_t>(),
                         x.at(2).get<std::uint64_t>()});
  }
  const auto& m = j.at("summary");
  s.summary.mean_s = estimate_from(m.at("mean_S"));
  s.summary.mean_k = estimate_from(m.at("mean_K"));
  s.summary.mean_n = estimate_from(m.at("mean_N"));
  s.summary.var_s = estimate_from(m.at("var_S"));
  s.summary.var_k = estimate_from(m.at("var_K"));
  s.summary.var_n = estimate_from(m.at("var_N"));
  s.summary.cov_sk = estimate_from(m.at("cov_SK"));
  s.summary.cov_sn = estimate_from(m.at("cov_SN"));
  s.summary.cov_kn = estimate_from(m.at("cov_KN"));
  s.summary.rho_sk = opt_estimate_from(m.at("rho_SK"));
  s.summary.rho_sn = opt_estimate_from(m.at("rho_SN"));
  s.summary.rho_kn = opt_estimate_from(m.at("rho_KN"));
  return s;
}

json to_json(const NormalityReport& r) {
  const auto& t = r.thresholds;
  return {
      {"count", r.count},
      {"thresholds",
       {{"ks_alpha", t.ks_alpha},
        {"max_cov_deviation", t.max_cov_deviation},
        {"mardia_skew_critical", t.mardia_skew_critical},
        {"mardia_kurtosis_z", t.mardia_kurtosis_z}}},
      {"ks", {{"x", r.ks_x}, {"y", r.ks_y}, {"critical", r.ks_critical}, {"pass", r.ks_pass}}},
      {"covariance",
       {{"mean", {r.mean[0], r.mean[1]}},
        {"matrix", {{r.covariance.a, r.covariance.b}, {r.covariance.b, r.covariance.c}}},
        {"max_deviation", r.cov_deviation},
        {"pass", r.cov_pass}}},
      {"mardia",
       {{"b1", number_or_null(r.mardia_b1)},
        {"skew_stat", number_or_null(r.mardia_skew_stat)},
        {"skew_pvalue", number_or_null(r.mardia_skew_pvalue)},
        {"skew_pass", r.skew_pass},
        {"b2", number_or_null(r.mardia_b2)},
        {"kurtosis_z", number_or_null(r.mardia_kurtosis_z)},
        {"kurtosis_pass", r.kurtosis_pass}}},
      {"passed", r.passed()},
  };
}

// ---- histograms ------------------------------------------------------------------

void write_csv(std::ostream& out, const Histogram2D& h) {
  out << "ix,iy,x_lo,x_hi,y_lo,y_hi,count\n";
  const double wx = (h.x_max - h.x_min) / h.bins_x;
  const double wy = (h.y_max - h.y_min) / h.bins_y;
  for (int i = 0; i < h.bins_x; ++i) {
    for (int j = 0; j < h.bins_y; ++j) {
      out << i << ',' << j << ',' << format_number(h.x_min + i * wx) << ','
          << format_number(h.x_min + (i + 1) * wx) << ',' << format_number(h.y_min + j * wy) << ','
          << format_number(h.y_min + (j + 1) * wy) << ',' << h.at(i, j) << '\n';
    }
  }
}

json to_json(const Histogram2D& h) {
  return {{"bins_x", h.bins_x}, {"bins_y", h.bins_y}, {"x_min", h.x_min}, {"x_max", h.x_max},
          {"y_min", h.y_min},   {"y_max", h.y_max},   {"counts", h.counts}};
}

Histogram2D histogram_from_json(const json& j) {
  Histogram2D h;
  h.bins_x = j.at("bins_x").get<int>();
  h.bins_y = j.at("bins_y").get<int>();
  h.x_min = j.at("x_min");
  h.x_max = j.at("x_max");
  h.y_min = j.at("y_min");
  h.y_max = j.at("y_max");
  h.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  return h;
}

}  // namespace digtree
