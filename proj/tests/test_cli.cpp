#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"

namespace {

struct Outcome {
  int status;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = digtree::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("moments: header and the n = 2 row") {
  const Outcome r = run({"moments", "--family", "binary-trie", "--p", "0.5", "--nmax", "8"});
  REQUIRE(r.status == 0);
  CHECK(first_line(r.out) ==
        "n,ES,EK,EN,ES2,EK2,EN2,ESK,ESN,EKN,VarS,VarK,VarN,CovSK,CovSN,CovKN,rhoSK,rhoSN,rhoKN");
  CHECK(r.out.find("\n2,2,4,") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("golden headers of every command") {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{"simulate", "--n", "8", "--trials", "4"}, "trial,S,K,N"},
      {{"fourier", "--m", "3", "--family", "mary-trie", "--kmax", "2"}, "k,re,im,tail_bound,accelerated"},
      {{"rho", "--n", "1000"}, "n,rho_asymptotic"},
      {{"cltcheck", "--n", "64", "--trials", "2000"}, "metric,value,threshold,pass"},
      {{"histogram", "--n", "32", "--trials", "50", "--bins", "4"}, "ix,iy,x_lo,x_hi,y_lo,y_hi,count"},
      {{"table4"}, "m,coefficient_ratio,period_mean,truncated_3dp"},
      {{"figure2-data", "--kmax", "4"}, "n,rho_exact,F,F_mean"},
  };
  for (const auto& [args, header] : cases) {
    const Outcome r = run(args);
    CAPTURE(args.front());
    CAPTURE(r.err);
    REQUIRE(r.status == 0);
    CHECK(first_line(r.out) == header);
  }
}

TEST_CASE("table4 rows") {
  const Outcome r = run({"table4"});
  REQUIRE(r.status == 0);
  for (const char* want : {"\n3,", ",0.751\n", "\n4,", ",0.814\n", "\n5,", ",0.841\n", "\n6,", ",0.856\n"}) {
    CHECK(r.out.find(want) != std::string::npos);
  }
}

TEST_CASE("figure2-data covers n = 32 .. 4096") {
  const Outcome r = run({"figure2-data"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\n32,") != std::string::npos);
  CHECK(r.out.find("\n4096,") != std::string::npos);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 58);  // header + 57 distinct grid points
}

TEST_CASE("JSON output carries the configuration") {
  const Outcome r = run({"rho", "--n", "4096", "--p", "1/2", "--format", "json"});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("meta").at("tool") == "digtree");
  CHECK(doc.at("meta").at("config").at("n") == 4096);
  CHECK(doc.at("data").at("rho_asymptotic").get<double>() == doctest::Approx(0.9272).epsilon(1e-3));
}

TEST_CASE("skewed sources") {
  const Outcome rho = run({"rho", "--p", "0.3", "--n", "100"});
  REQUIRE(rho.status == 0);
  CHECK(rho.out == "n,rho_asymptotic\n100,0\n");

  const Outcome needs_rational = run({"fourier", "--p", "0.3", "--rational", "1:2"});
  CHECK(needs_rational.status != 0);  // 0.3 is not the root of p = q^2

  const Outcome golden = run({"fourier", "--p", "0.38196601125010515", "--rational", "2:1", "--kmax", "1"});
  CAPTURE(golden.err);
  CHECK(golden.status == 0);

  const Outcome irrational = run({"fourier", "--p", "0.3"});
  REQUIRE(irrational.status == 0);
  CHECK(irrational.out.find("\n0,3.059169448") != std::string::npos);
  CHECK(irrational.out.find("\n1,") == std::string::npos);
}

TEST_CASE("errors: exit codes and JSON records") {
  const Outcome bad_family = run({"moments", "--family", "nonsense"});
  CHECK(bad_family.status == 2);
  CHECK(nlohmann::json::parse(bad_family.err).at("error") == "UsageError");

  const Outcome bad_probs = run({"moments", "--family", "mary-trie", "--probs", "0.5,0.6"});
  CHECK(bad_probs.status == 11);  // InvalidProbs
  const auto rec = nlohmann::json::parse(bad_probs.err);
  CHECK(rec.at("error") == "InvalidProbs");
  CHECK(rec.at("exit_code") == 11);

  CHECK(run({"moments", "--p", "0.3", "--nmax", "100000"}).status == 15);     // CapExceeded
  CHECK(run({"moments", "--family", "patricia", "--m", "3"}).status == 22);  // UnsupportedModel
  CHECK(run({"cltcheck", "--trials", "10"}).status == 23);                   // TooFewSamples
  CHECK(run({"moments", "--bucket", "2"}).status == 2);  // bucket flag on a plain trie
  CHECK(run({}).status == 2);
  CHECK(run({"--version"}).out == "0.1.0\n");
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::vector<std::string> args = {"simulate", "--family", "bucket-dst", "--bucket", "2",
                                         "--n", "200", "--trials", "300", "--seed", "42"};
  const Outcome a = run(args);
  auto single = args;
  single.insert(single.end(), {"--workers", "1"});
  const Outcome b = run(single);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != run({"simulate", "--family", "bucket-dst", "--bucket", "2", "--n", "200", "--trials", "300",
                      "--seed", "43"})
                     .out);
}

TEST_CASE("output directory from the environment") {
  const auto dir = std::filesystem::temp_directory_path() / "digtree_cli_test";
  std::filesystem::create_directories(dir);
  ::setenv(digtree::cli::kOutputDirEnv, dir.c_str(), 1);
  const Outcome r = run({"moments", "--nmax", "3", "--out", "m.csv"});
  ::unsetenv(digtree::cli::kOutputDirEnv);
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream in(dir / "m.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("n,ES,EK", 0) == 0);
  std::filesystem::remove_all(dir);
}
