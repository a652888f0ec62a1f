#include "cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "digtree/asymptotics.hpp"
#include "digtree/error.hpp"
#include "digtree/moments.hpp"
#include "digtree/montecarlo.hpp"
#include "digtree/serialize.hpp"

namespace digtree::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string family = "binary-trie";
  std::string p;      // exact decimal or a/b
  std::string probs;  // comma-separated, same syntax
  int m = 0;
  int bucket = 2;
  std::uint64_t n = 1024;
  int nmax = 64;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  int kmax = 10;
  int jmax = 50;
  double tol = 1e-16;
  int which = 2;
  std::string rational;  // r:l
  int bins = 32;
  bool whiten = false;
  std::string format = "csv";
  std::string out;

  bool p_set = false, probs_set = false, m_set = false, bucket_set = false;
};

[[noreturn]] void usage(const std::string& message) { throw Error(ErrorCode::UsageError, message); }

/// Decimal via from_chars (correctly rounded), or a/b of two decimals.
double parse_probability(std::string_view text) {
  auto parse_decimal = [&](std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      usage("cannot parse probability '" + std::string(text) + "'");
    }
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double den = parse_decimal(text.substr(slash + 1));
    if (den == 0.0) usage("zero denominator in '" + std::string(text) + "'");
    return parse_decimal(text.substr(0, slash)) / den;
  }
  return parse_decimal(text);
}

std::vector<double> parse_probability_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_probability(item));
  return out;
}

std::optional<RationalRatio> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  RationalRatio r;
  auto parse_int = [&](std::string_view s, int& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (colon == std::string::npos || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      usage("--rational expects r:l, got '" + text + "'");
    }
  };
  const std::string_view view(text);
  parse_int(view.substr(0, colon), r.r);
  parse_int(view.substr(colon == std::string::npos ? 0 : colon + 1), r.l);
  return r;
}

ModelSpec build_model(const RunConfig& c) {
  const Family family = parse_family(c.family);
  if (c.bucket_set && family != Family::BucketDST) usage("--bucket applies to bucket-dst only");
  const double p = c.p_set ? parse_probability(c.p) : 0.5;
  switch (family) {
    case Family::BinaryTrie:
      if (c.probs_set || c.m_set) usage("binary-trie takes --p only");
      return ModelSpec::binary_trie(p);
    case Family::BucketDST:
      if (c.probs_set || c.m_set) usage("bucket-dst takes --p and --bucket only");
      return ModelSpec::bucket_dst(p, c.bucket);
    case Family::MaryTrie:
    case Family::Patricia: {
      if (static_cast<int>(c.p_set) + static_cast<int>(c.probs_set) + static_cast<int>(c.m_set) != 1) {
        usage(c.family + " needs exactly one of --p, --probs, --m");
      }
      const bool trie = family == Family::MaryTrie;
      if (c.m_set) return trie ? ModelSpec::symmetric_mary_trie(c.m) : ModelSpec::symmetric_patricia(c.m);
      std::vector<double> probs = c.probs_set ? parse_probability_list(c.probs) : std::vector<double>{p, 1.0 - p};
      return trie ? ModelSpec::mary_trie(std::move(probs)) : ModelSpec::patricia(std::move(probs));
    }
  }
  usage("unknown family");
}

CoefficientOptions coefficient_options(const RunConfig& c) {
  CoefficientOptions o;
  o.k_window = c.kmax;
  o.j_window = c.jmax;
  o.series.rel_tol = c.tol;
  return o;
}

json config_json(const RunConfig& c) {
  // The resolved model, for commands that take model flags.
  const bool fixed_model = c.command == "table3" || c.command == "table4" || c.command == "figure2-data";
  json j = {{"command", c.command}, {"family", c.family}, {"p", c.p},
          {"probs", c.probs},     {"m", c.m},           {"bucket", c.bucket},
          {"n", c.n},             {"nmax", c.nmax},     {"trials", c.trials},
          {"seed", c.seed},       {"kmax", c.kmax},     {"jmax", c.jmax},
          {"tol", c.tol},         {"which", c.which},   {"rational", c.rational},
          {"bins", c.bins},       {"whiten", c.whiten}, {"format", c.format}};
  j["model"] = fixed_model ? json(nullptr) : to_json(build_model(c));
  return j;
}

std::string truncated_3dp(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", std::floor(x * 1000.0) / 1000.0);
  return buf;
}

/// Writes either the CSV body or {"meta", "data"} to the chosen sink.
void emit(const RunConfig& c, std::ostream& stdout_sink, const std::function<void(std::ostream&)>& csv,
          const std::function<json()>& data) {
  std::ofstream file;
  std::ostream* sink = &stdout_sink;
  if (!c.out.empty()) {
    std::filesystem::path path(c.out);
    if (path.is_relative()) {
      if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
        path = std::filesystem::path(dir) / path;
      }
    }
    file.open(path, std::ios::binary);
    if (!file) usage("cannot open output file '" + path.string() + "'");
    sink = &file;
  }
  if (c.format == "csv") {
    csv(*sink);
  } else {
    json doc = {{"meta",
                 {{"tool", kToolName},
                  {"version", kToolVersion},
                  {"format_version", kFormatVersion},
                  {"config", config_json(c)}}},
                {"data", data()}};
    *sink << doc.dump(2) << '\n';
  }
  sink->flush();
}

// ---- commands ------------------------------------------------------------------

void cmd_simulate(const RunConfig& c, std::ostream& out) {
  const SampleSet s = mc_moments(build_model(c), c.n, c.trials, c.seed, c.workers);
  emit(c, out, [&](std::ostream& o) { write_csv(o, s); }, [&] { return to_json(s); });
}

void cmd_moments(const RunConfig& c, std::ostream& out) {
  const MomentTable t = moment_table(build_model(c), c.nmax);
  emit(c, out, [&](std::ostream& o) { write_csv(o, t); }, [&] { return to_json(t); });
}

FourierCoefficientSet coefficients_for(const RunConfig& c) {
  const ModelSpec model = build_model(c);
  const CoefficientOptions opts = coefficient_options(c);
  const int m = model.alphabet_size();
  const bool trie = model.family == Family::BinaryTrie || model.family == Family::MaryTrie;
  if (trie && model.is_symmetric()) {
    return m == 2 && model.family == Family::BinaryTrie ? g_coeffs_sym_binary(c.which, opts)
                                                        : g_coeffs_sym_mary(c.which, m, opts);
  }
  if (trie && m == 2) {
    if (c.which != 2) {
      throw Error(ErrorCode::UnsupportedModel,
                  "only the covariance coefficients (--which 2) exist for unequal probabilities");
    }
    return g2_asym_binary(spectrum(model.probs, parse_rational(c.rational)), opts);
  }
  if (model.family == Family::Patricia && model.is_symmetric()) {
    return g_coeffs_patricia(c.which, m, opts);
  }
  throw Error(ErrorCode::UnsupportedModel, "no closed-form coefficients for this model");
}

void cmd_fourier(const RunConfig& c, std::ostream& out) {
  const FourierCoefficientSet s = coefficients_for(c);
  emit(c, out, [&](std::ostream& o) { write_csv(o, s); }, [&] { return to_json(s); });
}

void cmd_rho(const RunConfig& c, std::ostream& out) {
  const double n = static_cast<double>(c.n);
  const double rho = rho_asymptotic(build_model(c), n, coefficient_options(c));
  emit(
      c, out, [&](std::ostream& o) { o << "n,rho_asymptotic\n" << c.n << ',' << format_number(rho) << '\n'; },
      [&] { return json{{"n", c.n}, {"rho_asymptotic", rho}}; });
}

struct Centering {
  CovMatrix2 m;
  std::optional<Vec2> means;
};

/// Exact covariance and means where the moment engine covers the model, else
/// the sample estimates.
Centering centering_for(const ModelSpec& model, std::uint64_t n, std::span<const Vec2> points) {
  try {
    const MomentTable t = moment_table(model, static_cast<int>(n));
    const auto& row = t.at(static_cast<int>(n));
    return {covariance_matrix(t, static_cast<int>(n)), Vec2{row.es, row.ek}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedModel && e.code() != ErrorCode::CapExceeded) throw;
    return {sample_covariance(points), std::nullopt};
  }
}

void cmd_cltcheck(const RunConfig& c, std::ostream& out) {
  const ModelSpec model = build_model(c);
  const SampleSet s = mc_moments(model, c.n, c.trials, c.seed, c.workers);
  const auto points = size_kpl_points(s.samples);
  const Centering centering = centering_for(model, c.n, points);
  const WhitenedSample w = whiten(points, centering.m, centering.means);
  const NormalityReport r = normality_check(w.points);
  auto csv = [&](std::ostream& o) {
    auto flag = [](bool b) { return b ? "1" : "0"; };
    o << "metric,value,threshold,pass\n";
    o << "exact_centering," << flag(w.exact_centering) << ",,\n";
    o << "ks_x," << format_number(r.ks_x) << ',' << format_number(r.ks_critical) << ',' << flag(r.ks_x < r.ks_critical) << '\n';
    o << "ks_y," << format_number(r.ks_y) << ',' << format_number(r.ks_critical) << ',' << flag(r.ks_y < r.ks_critical) << '\n';
    o << "cov_deviation," << format_number(r.cov_deviation) << ','
      << format_number(r.thresholds.max_cov_deviation) << ',' << flag(r.cov_pass) << '\n';
    o << "mardia_skew_stat," << format_number(r.mardia_skew_stat) << ','
      << format_number(r.thresholds.mardia_skew_critical) << ',' << flag(r.skew_pass) << '\n';
    o << "mardia_kurtosis_z," << format_number(r.mardia_kurtosis_z) << ','
      << format_number(r.thresholds.mardia_kurtosis_z) << ',' << flag(r.kurtosis_pass) << '\n';
  };
  emit(c, out, csv, [&] {
    return json{{"n", c.n}, {"trials", c.trials}, {"exact_centering", w.exact_centering}, {"report", to_json(r)}};
  });
}

void cmd_histogram(const RunConfig& c, std::ostream& out) {
  const ModelSpec model = build_model(c);
  const SampleSet s = mc_moments(model, c.n, c.trials, c.seed, c.workers);
  std::vector<Vec2> points = size_kpl_points(s.samples);
  if (c.whiten) {
    const Centering centering = centering_for(model, c.n, points);
    points = whiten(points, centering.m, centering.means).points;
  }
  const Histogram2D h = joint_histogram(points, c.bins, c.bins);
  emit(c, out, [&](std::ostream& o) { write_csv(o, h); }, [&] { return to_json(h); });
}

void cmd_table(const RunConfig& c, std::ostream& out, bool patricia) {
  struct Row {
    int m;
    double ratio, mean;
  };
  std::vector<Row> rows;
  const CoefficientOptions opts = coefficient_options(c);
  for (int m = patricia ? 3 : 2; m <= 6; ++m) {
    const auto f = patricia ? CorrelationAsymptote::patricia(m, opts) : CorrelationAsymptote::trie(m, opts);
    rows.push_back({m, f.coefficient_ratio(), f.period_mean()});
  }
  auto csv = [&](std::ostream& o) {
    o << "m,coefficient_ratio,period_mean,truncated_3dp\n";
    for (const auto& r : rows) {
      o << r.m << ',' << format_number(r.ratio) << ',' << format_number(r.mean) << ',' << truncated_3dp(r.ratio) << '\n';
    }
  };
  emit(c, out, csv, [&] {
    json data = json::array();
    for (const auto& r : rows) {
      data.push_back({{"m", r.m}, {"coefficient_ratio", r.ratio}, {"period_mean", r.mean},
                      {"truncated_3dp", truncated_3dp(r.ratio)}});
    }
    return data;
  });
}

/// n = round(32 * 2^(i/8)) for i = 0..56, i.e. 32 .. 4096.
std::vector<int> figure2_grid() {
  std::vector<int> grid;
  for (int i = 0; i <= 56; ++i) {
    const int n = static_cast<int>(std::lround(32.0 * std::exp2(i / 8.0)));
    if (grid.empty() || grid.back() != n) grid.push_back(n);
  }
  return grid;
}

void cmd_figure2(const RunConfig& c, std::ostream& out) {
  const auto grid = figure2_grid();
  const MomentTable t = moment_table_binary_trie(0.5, grid.back());
  const auto f = CorrelationAsymptote::trie(2, coefficient_options(c));
  const double f_mean = f.period_mean();
  struct Row {
    int n;
    double exact, asym;
  };
  std::vector<Row> rows;
  for (int n : grid) rows.push_back({n, t.at(n).rho_sk.value(), f(n)});
  auto csv = [&](std::ostream& o) {
    o << "n,rho_exact,F,F_mean\n";
    for (const auto& r : rows) {
      o << r.n << ',' << format_number(r.exact) << ',' << format_number(r.asym) << ',' << format_number(f_mean) << '\n';
    }
  };
  emit(c, out, csv, [&] {
    json data = json::array();
    for (const auto& r : rows) data.push_back({{"n", r.n}, {"rho_exact", r.exact}, {"F", r.asym}, {"F_mean", f_mean}});
    return data;
  });
}

// ---- option wiring ---------------------------------------------------------------

void add_output_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Output file (relative paths use $" + std::string(kOutputDirEnv) + ")");
}

void add_model_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--family", c.family, "binary-trie | mary-trie | patricia | bucket-dst");
  sub->add_option("--p", c.p, "Probability of the first symbol (decimal or a/b)")
      ->each([&c](const std::string&) { c.p_set = true; });
  sub->add_option("--probs", c.probs, "Comma-separated symbol probabilities")
      ->each([&c](const std::string&) { c.probs_set = true; });
  sub->add_option("--m", c.m, "Alphabet size of a symmetric model")
      ->each([&c](const std::string&) { c.m_set = true; });
  sub->add_option("--bucket", c.bucket, "Bucket capacity b (bucket-dst)")
      ->each([&c](const std::string&) { c.bucket_set = true; });
}

void add_sampling_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--n", c.n, "Number of keys");
  sub->add_option("--trials", c.trials, "Number of random trees");
  sub->add_option("--seed", c.seed, "Base seed");
  sub->add_option("--workers", c.workers, "Worker threads (0 = all cores); does not affect results");
}

void add_series_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--kmax", c.kmax, "Fourier window |k| <= kmax")->check(CLI::NonNegativeNumber);
  sub->add_option("--jmax", c.jmax, "Convolution window |j| <= jmax")->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", c.tol, "Relative series truncation tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Shape statistics of random digital trees", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo samples of (S, K, N)");
  add_model_flags(simulate, c);
  add_sampling_flags(simulate, c);
  add_output_flags(simulate, c);

  auto* moments = app.add_subcommand("moments", "Exact moments for n = 0..nmax");
  add_model_flags(moments, c);
  moments->add_option("--nmax", c.nmax, "Largest n")->check(CLI::NonNegativeNumber);
  add_output_flags(moments, c);

  auto* fourier = app.add_subcommand("fourier", "Fourier coefficients of the periodic variance terms");
  add_model_flags(fourier, c);
  add_series_flags(fourier, c);
  fourier->add_option("--which", c.which, "1 = VarS, 2 = CovSK, 3 = VarK")->check(CLI::Range(1, 3));
  fourier->add_option("--rational", c.rational, "Declare log p / log q = r/l as r:l");
  add_output_flags(fourier, c);

  auto* rho = app.add_subcommand("rho", "Limiting correlation of size and path length");
  add_model_flags(rho, c);
  add_series_flags(rho, c);
  rho->add_option("--n", c.n, "Number of keys");
  add_output_flags(rho, c);

  auto* clt = app.add_subcommand("cltcheck", "Whitened bivariate normality diagnostics");
  add_model_flags(clt, c);
  add_sampling_flags(clt, c);
  add_output_flags(clt, c);

  auto* hist = app.add_subcommand("histogram", "Joint histogram of (S, K)");
  add_model_flags(hist, c);
  add_sampling_flags(hist, c);
  hist->add_option("--bins", c.bins, "Bins per axis")->check(CLI::Range(2, 4096));
  hist->add_flag("--whiten", c.whiten, "Whiten with the exact covariance first");
  add_output_flags(hist, c);

  auto* table3 = app.add_subcommand("table3", "Average correlation of symmetric tries, m = 2..6");
  add_series_flags(table3, c);
  add_output_flags(table3, c);

  auto* table4 = app.add_subcommand("table4", "Average correlation of symmetric PATRICIA tries, m = 3..6");
  add_series_flags(table4, c);
  add_output_flags(table4, c);

  auto* figure2 = app.add_subcommand("figure2-data", "Exact and asymptotic correlation, n = 32..4096");
  add_series_flags(figure2, c);
  add_output_flags(figure2, c);

  auto write_error = [&](std::string_view name, const std::string& message, int status) {
    err << json{{"error", name}, {"message", message}, {"exit_code", status}}.dump() << '\n';
    return status;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    c.command = app.get_subcommands().front()->get_name();
    const std::map<std::string, std::function<void()>> commands = {
        {"simulate", [&] { cmd_simulate(c, out); }},
        {"moments", [&] { cmd_moments(c, out); }},
        {"fourier", [&] { cmd_fourier(c, out); }},
        {"rho", [&] { cmd_rho(c, out); }},
        {"cltcheck", [&] { cmd_cltcheck(c, out); }},
        {"histogram", [&] { cmd_histogram(c, out); }},
        {"table3", [&] { cmd_table(c, out, false); }},
        {"table4", [&] { cmd_table(c, out, true); }},
        {"figure2-data", [&] { cmd_figure2(c, out); }},
    };
    commands.at(c.command)();
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    return write_error(error_code_name(ErrorCode::UsageError), e.what(), exit_status(ErrorCode::UsageError));
  } catch (const Error& e) {
    return write_error(error_code_name(e.code()), e.what(), exit_status(e.code()));
  } catch (const std::exception& e) {
    return write_error("InternalError", e.what(), 1);
  }
}

}  // namespace digtree::cli
