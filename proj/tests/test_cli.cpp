#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "psdb/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int rc;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int rc = psdb::cli::run(args, out, err);
  return {rc, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> v;
  for (std::string t; is >> t;) v.push_back(t);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "psdb_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string header_command(const std::string& csv) {
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);)
    if (line.rfind("# command: ", 0) == 0) return line.substr(11);
  return {};
}

// rows of "abscissa,value,flag" after the header lines
std::vector<std::pair<double, std::string>> rows(const std::string& csv) {
  std::istringstream is(csv);
  std::vector<std::pair<double, std::string>> r;
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#' || line[0] == 'a') continue;
    const auto a = line.find(','), b = line.rfind(',');
    r.emplace_back(std::stod(line.substr(a + 1, b - a - 1)), line.substr(b + 1));
  }
  return r;
}

std::vector<double> abscissae(const std::string& csv) {
  std::istringstream is(csv);
  std::vector<double> r;
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#' && line[0] != 'a') r.push_back(std::stod(line.substr(0, line.find(','))));
  return r;
}

}  // namespace

TEST_CASE("delta_star example") {
  const auto r = run({"bounds", "eval", "--formula", "delta_star", "--params", "eps=0"});
  REQUIRE(r.rc == 0);
  const auto j = json::parse(r.out);
  CHECK(std::abs(j["value"].get<double>() - 0.137) <= 0.001);
  CHECK(j["params"]["eps"] == 0.0);
  CHECK(j["version"] == psdb::cli::version());
}

TEST_CASE("moments example") {
  const auto r = run({"hypercube", "verify", "--lemma", "moments", "--n", "6"});
  REQUIRE(r.rc == 0);
  const auto j = json::parse(r.out);
  CHECK(j["mean"] == 0.0);
  CHECK(j["second_moment"] == 60.0);
  CHECK(j["passed"] == true);
}

TEST_CASE("base-psd n=1 example") {
  const auto r = run({"widths", "estimate", "--kind", "base-psd", "--n", "1", "--trials", "1000", "--seed", "7",
                      "--format", "json"});
  REQUIRE(r.rc == 0);
  const auto j = json::parse(r.out);
  CHECK(std::abs(j["mean"].get<double>()) <= 3.0 * j["std_error"].get<double>());
  CHECK(j["trials"] == 1000);
  CHECK(j["seed"] == 7);
}

TEST_CASE("exit codes and single-line errors") {
  const std::vector<std::vector<std::string>> usage{
      {},
      {"nonsense"},
      {"bounds", "eval"},
      {"bounds", "eval", "--formula", "phi", "--params", "n=10,k=3,bogus=1"},
      {"bounds", "eval", "--formula", "phi", "--params", "n=10"},
      {"bounds", "eval", "--formula", "nope"},
      {"bounds", "eval", "--formula", "xi", "--params", "delta=2"},
      {"bounds", "eval", "--formula", "xi", "--params", "delta=abc"},
      {"bounds", "curve", "--formula", "xi", "--grid", "1:0:3"},
      {"widths", "estimate", "--kind", "base-psd", "--n", "3", "--trials", "1"},
      {"widths", "estimate", "--kind", "base-psd", "--n", "3", "--bogus-flag"},
      {"widths", "estimate", "--kind", "oracle:unknown", "--n", "3"},
      {"widths", "estimate", "--kind", "sparse-dual", "--n", "40", "--k", "20", "--trials", "2"},
      {"cones", "eps-star", "--n", "5", "--k", "1"},
      {"cones", "member", "--matrix", "/nonexistent/file", "--sparse-k", "2"},
      {"hypercube", "verify", "--lemma", "bogus", "--n", "3"},
      {"figures", "--name", "bogus"},
      {"bounds", "eval", "--config", "/nonexistent/config"},
  };
  for (const auto& args : usage) {
    const auto r = run(args);
    INFO(r.err);
    CHECK(r.rc == psdb::cli::kUsageError);
    CHECK(r.err.rfind("psdb: error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
  CHECK(run({"--help"}).rc == 0);
  CHECK(run({"--version"}).out == psdb::cli::version() + "\n");
}

TEST_CASE("infinite values are null with a flag") {
  const auto j = json::parse(run({"bounds", "eval", "--formula", "psi", "--params", "delta=0"}).out);
  CHECK(j["value"].is_null());
  CHECK(j["flag"] == "+inf");
}

TEST_CASE("curve CSV reproduces itself from its header") {
  const fs::path a = scratch("xi_a.csv"), b = scratch("xi_b.csv");
  REQUIRE(run({"bounds", "curve", "--formula", "thm1", "--grid", "1:50:50", "--params", "n=1000,eps=0.1", "--out",
               a.string()})
              .rc == 0);
  const std::string first = slurp(a);
  auto args = split(header_command(first));
  REQUIRE(!args.empty());
  args.push_back("--out");
  args.push_back(b.string());
  REQUIRE(run(args).rc == 0);
  CHECK(slurp(b) == first);
}

TEST_CASE("width CSV reproduces itself from its header") {
  const fs::path a = scratch("w_a.csv"), b = scratch("w_b.csv");
  REQUIRE(run({"widths", "estimate", "--kind", "sparse-dual", "--n", "7", "--k", "3", "--trials", "60", "--seed",
               "11", "--out", a.string()})
              .rc == 0);
  const std::string first = slurp(a);
  auto args = split(header_command(first));
  args.push_back("--out");
  args.push_back(b.string());
  REQUIRE(run(args).rc == 0);
  CHECK(slurp(b) == first);
  CHECK(first.find("# seed: 11\n") != std::string::npos);
  CHECK(first.find("kind,n,k,N,trials,seed,mean,std_error\n") != std::string::npos);
}

TEST_CASE("finite-n phi curves reproduce themselves") {
  const fs::path a = scratch("phi.csv");
  REQUIRE(run({"bounds", "curve", "--formula", "phi", "--grid", "1:20:20", "--params", "n=20", "--finite-n",
               "--trials", "40", "--seed", "5", "--out", a.string()})
              .rc == 0);
  const fs::path mc = scratch("phi_phi_ratio=mc.csv");
  REQUIRE(fs::exists(mc));
  REQUIRE(fs::exists(scratch("phi_phi_ratio=1.csv")));
  const std::string first = slurp(mc);
  auto args = split(header_command(first));
  const fs::path b = scratch("phi_again.csv");
  args.push_back("--out");
  args.push_back(b.string());
  REQUIRE(run(args).rc == 0);
  CHECK(slurp(scratch("phi_again_phi_ratio=mc.csv")) == first);
}

TEST_CASE("config file supplies defaults, command line wins") {
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream os(cfg);
    os << "# bounds\n[run]\nformula = delta_star\nparams = \"eps=0\"  # trailing comment\n";
  }
  auto r = run({"bounds", "eval", "--config", cfg.string()});
  REQUIRE(r.rc == 0);
  CHECK(std::abs(json::parse(r.out)["value"].get<double>() - 0.13622512528745567) < 1e-12);

  r = run({"bounds", "eval", "--config=" + cfg.string(), "--params", "eps=0.5"});
  REQUIRE(r.rc == 0);
  CHECK(json::parse(r.out)["params"]["eps"] == 0.5);

  {
    std::ofstream os(cfg);
    os << "formula delta_star\n";
  }
  CHECK(run({"bounds", "eval", "--config", cfg.string()}).rc == psdb::cli::kUsageError);
}

TEST_CASE("witness and membership through files") {
  const fs::path w = scratch("w.sym");
  auto r = run({"cones", "witness", "--n", "9", "--k", "4", "--out", w.string()});
  REQUIRE(r.rc == 0);
  auto j = json::parse(r.out);
  CHECK(j["sparse_member"] == true);
  CHECK(std::abs(j["eps_star"].get<double>() - 5.0 / 3.0) < 1e-15);

  j = json::parse(run({"cones", "member", "--matrix", w.string(), "--sparse-k", "4"}).out);
  CHECK(j["member"] == true);
  CHECK(j["psd"] == false);
  j = json::parse(run({"cones", "member", "--matrix", w.string(), "--sparse-k", "5"}).out);
  CHECK(j["member"] == false);
  CHECK(j["certain"] == true);
}

TEST_CASE("verification runs report counts") {
  for (const std::string lemma : {"harmonic", "hypercontractivity"}) {
    const auto r = run({"hypercube", "verify", "--lemma", lemma, "--n", "4", "--trials", "25", "--seed", "4"});
    REQUIRE(r.rc == 0);
    const auto j = json::parse(r.out);
    CHECK(j["checked"] == 25);
    CHECK(j["failed"] == 0);
    CHECK_FALSE(j.contains("counterexamples"));
  }
  CHECK(run({"hypercube", "verify", "--lemma", "hypercontractivity", "--n", "3", "--rho", "2"}).rc ==
        psdb::cli::kUsageError);
}

TEST_CASE("figures: sparse-overview shape") {
  const fs::path dir = scratch("fig_sparse");
  const auto r = run({"figures", "--name", "sparse-overview", "--out", dir.string()});
  REQUIRE(r.rc == 0);
  CHECK(json::parse(r.out)["files"].size() == 3);
  const std::string psi = slurp(dir / "sparse-overview_psi.csv");
  const std::string xi = slurp(dir / "sparse-overview_xi.csv");
  const auto ps = rows(psi), xs = rows(xi);
  const auto dx = abscissae(xi);
  REQUIRE(ps.size() == 999);
  for (const auto& [v, flag] : ps) CHECK(v > 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (dx[i] >= 0.138) CHECK(xs[i].first == 0.0);
}

TEST_CASE("figures: delta-star decreasing and capped") {
  const fs::path dir = scratch("fig_ds");
  REQUIRE(run({"figures", "--name", "delta-star", "--out", dir.string()}).rc == 0);
  const std::string csv = slurp(dir / "delta-star_delta_star.csv");
  const auto v = rows(csv);
  const auto e = abscissae(csv);
  REQUIRE(v.size() == 201);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i].first <= 1.0 / ((1.0 + e[i]) * (1.0 + e[i])));
    if (i) CHECK(v[i].first < v[i - 1].first);
  }
}

TEST_CASE("figures: entropy-bracket and xc-lower") {
  const fs::path dir = scratch("fig_eb");
  auto j = json::parse(run({"figures", "--name", "entropy-bracket", "--out", dir.string()}).out);
  CHECK(j["files"].size() == 4);  // entropy and eps in {0, 0.2, 0.5}
  j = json::parse(run({"figures", "--name", "xc-lower", "--out", dir.string(), "--grid", "1:991:100"}).out);
  REQUIRE(j["files"].size() == 2);
  for (const auto& f : j["files"])
    for (const auto& [v, flag] : rows(slurp(f["path"].get<std::string>()))) {
      CHECK(flag == "finite");
      CHECK(v >= 0.0);
    }
}
