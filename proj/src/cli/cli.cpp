#include "psdb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "psdb/bounds.hpp"
#include "psdb/cones.hpp"
#include "psdb/error.hpp"
#include "psdb/hypercube.hpp"
#include "psdb/widths.hpp"

#ifndef PSDB_VERSION
#define PSDB_VERSION "0.0.0"
#endif

namespace psdb::cli {

namespace {

using json = nlohmann::ordered_json;
using Params = std::map<std::string, double>;
namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinities; those become null with a flag next to them.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string value_flag(double v) {
  if (std::isnan(v)) return "domain-error";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return "finite";
}

Params parse_params(const std::string& text) {
  Params params;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--params expects key=value pairs, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != raw.size() || raw.empty()) throw InvalidArgument("parameter '" + key + "' is not a number: '" + raw + "'");
    if (!params.emplace(key, value).second) throw InvalidArgument("parameter '" + key + "' given twice");
  }
  return params;
}

std::string echo_params(const Params& params) {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ',';
    s += k + '=' + fmt17(v);
  }
  return s;
}

json params_json(const Params& params) {
  json j = json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

void require_keys(const std::string& what, const Params& params, const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  for (const auto& key : required)
    if (!params.count(key)) throw InvalidArgument(what + " requires parameter '" + key + "'");
  for (const auto& [key, value] : params)
    if (!required.count(key) && !optional.count(key))
      throw InvalidArgument(what + " does not take parameter '" + key + "'");
}

std::int64_t as_int(const Params& params, const std::string& key) {
  const double v = params.at(key);
  if (!(std::abs(v) < 9.2e18) || v != std::floor(v)) throw InvalidArgument("parameter '" + key + "' must be an integer");
  return static_cast<std::int64_t>(v);
}

double get_or(const Params& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

json header(const std::string& command, std::uint64_t seed) {
  return json{{"tool", "psdb"}, {"version", version()}, {"command", command}, {"seed", seed}};
}

// Comment lines written above every CSV; `command` omits --out so that the
// file reproduces itself when rerun with a different destination.
void write_csv_header(std::ostream& os, const std::string& command, std::uint64_t seed) {
  os << "# psdb " << version() << '\n' << "# command: " << command << '\n' << "# seed: " << seed << '\n';
}

class Output {
 public:
  Output(std::ostream& fallback, const std::string& path) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InvalidArgument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ostream& fallback_;
  std::ofstream file_;
};

// --- bounds ----------------------------------------------------------------

struct FormulaSpec {
  std::set<std::string> required;
  std::set<std::string> optional;
  std::function<double(const Params&)> eval;
};

const std::map<std::string, FormulaSpec>& formulas() {
  using namespace psdb::bounds;
  static const std::map<std::string, FormulaSpec> table{
      {"binary_entropy", {{"p"}, {}, [](const Params& p) { return binary_entropy(p.at("p")); }}},
      {"normal_quantile", {{"p"}, {}, [](const Params& p) { return normal_quantile(p.at("p")); }}},
      {"chi2_quantile", {{"p"}, {}, [](const Params& p) { return chi2_quantile(p.at("p")); }}},
      {"sparse_integral", {{"delta"}, {}, [](const Params& p) { return sparse_integral(p.at("delta")); }}},
      {"phi",
       {{"n", "k"},
        {"eps", "ratio"},
        [](const Params& p) {
          return phi(as_int(p, "n"), as_int(p, "k"), get_or(p, "eps", 0.0), get_or(p, "ratio", 1.0));
        }}},
      {"delta_star",
       {{}, {"eps", "tol"}, [](const Params& p) { return delta_star(get_or(p, "eps", 0.0), get_or(p, "tol", 1e-9)); }}},
      {"xi", {{"delta"}, {}, [](const Params& p) { return xi(p.at("delta")); }}},
      {"zeta",
       {{"delta"}, {}, [](const Params& p) {
          return p.at("delta") == 0.0 ? std::numeric_limits<double>::infinity() : zeta(p.at("delta"));
        }}},
      {"psi",
       {{"delta"}, {}, [](const Params& p) {
          return p.at("delta") == 0.0 ? std::numeric_limits<double>::infinity() : psi(p.at("delta"));
        }}},
      {"avg_ratio",
       {{"delta"}, {}, [](const Params& p) {
          return p.at("delta") == 0.0 ? std::numeric_limits<double>::infinity() : avg_ratio_lower(p.at("delta"));
        }}},
      {"thm1",
       {{"n", "k"},
        {"eps", "c1", "c2"},
        [](const Params& p) {
          return thm1_xc_lower(as_int(p, "n"), as_int(p, "k"), get_or(p, "eps", 0.0),
                               HansonWrightConstants{get_or(p, "c1", 1.0), get_or(p, "c2", 1.0)});
        }}},
      {"thm2",
       {{"n", "k"}, {"eps"}, [](const Params& p) { return thm2_xc_lower(as_int(p, "n"), as_int(p, "k"), get_or(p, "eps", 0.0)); }}},
      {"depressed_cubic",
       {{"p", "q"}, {}, [](const Params& p) { return depressed_cubic_positive_root(p.at("p"), p.at("q")); }}},
      {"maximal",
       {{"v", "N"}, {"c"}, [](const Params& p) { return maximal_bound(p.at("v"), get_or(p, "c", 0.0), p.at("N")); }}},
      {"eps_star_sparse",
       {{"n", "k"}, {}, [](const Params& p) { return cones::eps_star_lower_sparse(as_int(p, "n"), as_int(p, "k")); }}},
      {"kappa", {{"d"}, {}, [](const Params& p) { return widths::kappa(as_int(p, "d")); }}},
  };
  return table;
}

std::string formula_names() {
  std::string s;
  for (const auto& [name, spec] : formulas()) s += (s.empty() ? "" : ", ") + name;
  return s;
}

// Finite-n width ratio w_G(B_H(S^n_+)) / sqrt(2n) estimated by Monte Carlo.
double width_ratio_estimate(std::int64_t n, std::int64_t trials, std::uint64_t seed) {
  if (n > 400) throw DomainError("finite-n width ratio is limited to n <= 400");
  return widths::width_base_psd(n, trials, Seed{seed}).mean / std::sqrt(2.0 * static_cast<double>(n));
}

struct BoundsOptions {
  std::string formula;
  std::string params;
  std::string grid;
  std::string out;
  bool finite_n = false;
  std::int64_t trials = 2000;
  std::uint64_t seed = 0;
};

int bounds_eval(const BoundsOptions& o, std::ostream& out) {
  const auto it = formulas().find(o.formula);
  if (it == formulas().end())
    throw InvalidArgument("unknown formula '" + o.formula + "' (expected one of: " + formula_names() + ")");
  const Params params = parse_params(o.params);
  require_keys("formula '" + o.formula + "'", params, it->second.required, it->second.optional);
  const double value = it->second.eval(params);

  std::string command = "bounds eval --formula " + o.formula;
  if (!params.empty()) command += " --params " + echo_params(params);
  if (o.finite_n) command += " --finite-n --trials " + std::to_string(o.trials) + " --seed " + std::to_string(o.seed);
  json j = header(command, o.seed);
  j["formula"] = o.formula;
  j["params"] = params_json(params);
  j["value"] = number_or_null(value);
  j["flag"] = value_flag(value);
  if (o.finite_n) {
    if (o.formula != "phi") throw InvalidArgument("--finite-n applies to formula 'phi' only");
    Params finite = params;
    finite["ratio"] = width_ratio_estimate(as_int(params, "n"), o.trials, o.seed);
    const double v = it->second.eval(finite);
    j["finite_n"] = {{"width_ratio", finite["ratio"]}, {"trials", o.trials}, {"value", number_or_null(v)}};
  }
  Output dest(out, o.out);
  dest.stream() << j.dump(2) << '\n';
  return kOk;
}

std::string with_suffix(const std::string& path, const std::string& label) {
  const fs::path p(path);
  const std::string stem = p.stem().string();
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  return (p.parent_path() / (stem + "_" + label + ext)).string();
}

int bounds_curve(const BoundsOptions& o, std::ostream& out) {
  const auto grid = bounds::Grid::parse(o.grid);
  Params params = parse_params(o.params);
  std::vector<bounds::BoundCurve> curves;
  if (o.finite_n) {
    if (o.formula != "phi") throw InvalidArgument("--finite-n applies to curve 'phi' only");
    if (!params.count("n")) throw InvalidArgument("curve 'phi' requires parameter 'n'");
    curves = bounds::emit_curve(o.formula, grid, params);
    curves[0].label = "phi_ratio=" + fmt17(get_or(params, "ratio", 1.0));
    Params finite = params;
    finite["ratio"] = width_ratio_estimate(as_int(params, "n"), o.trials, o.seed);
    auto extra = bounds::emit_curve(o.formula, grid, finite);
    extra[0].label = "phi_ratio=mc";
    curves.push_back(extra[0]);
  } else {
    curves = bounds::emit_curve(o.formula, grid, params);
  }

  std::string command = "bounds curve --formula " + o.formula + " --grid " + o.grid;
  if (!params.empty()) command += " --params " + echo_params(params);
  if (o.finite_n) command += " --finite-n --trials " + std::to_string(o.trials) + " --seed " + std::to_string(o.seed);

  if (o.out.empty()) {
    for (const auto& c : curves) {
      write_csv_header(out, command, o.seed);
      out << "# curve: " << c.label << '\n';
      bounds::write_curve_csv(out, c);
    }
    return kOk;
  }
  for (const auto& c : curves) {
    const std::string path = curves.size() == 1 ? o.out : with_suffix(o.out, c.label);
    Output dest(out, path);
    write_csv_header(dest.stream(), command, o.seed);
    dest.stream() << "# curve: " << c.label << '\n';
    bounds::write_curve_csv(dest.stream(), c);
  }
  return kOk;
}

// --- widths ----------------------------------------------------------------

struct WidthsOptions {
  std::string kind;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::string family;
  std::int64_t sparse_k = 0;
  std::string mode = "exhaustive";
  std::optional<std::int64_t> trials;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  bool keep_values = false;
};

cones::ConeFamily load_family(const WidthsOptions& o) {
  if (o.sparse_k > 0) return cones::coordinate_family(o.n, o.sparse_k);
  if (o.family.rfind("random:", 0) == 0) {
    std::int64_t count = 0;
    try {
      count = std::stoll(o.family.substr(7));
    } catch (const std::exception&) {
    }
    if (count < 1) throw InvalidArgument("--family random:<N> needs N >= 1");
    if (o.k < 1) throw InvalidArgument("--family random:<N> needs --k");
    return cones::random_family(o.n, o.k, static_cast<std::size_t>(count), Seed{o.seed ^ 0x9e3779b97f4a7c15ULL});
  }
  std::ifstream in(o.family);
  if (!in) throw InvalidArgument("cannot read family file '" + o.family + "'");
  return cones::read_conefam(in);
}

int widths_estimate(WidthsOptions o, std::ostream& out) {
  // --out csv|json is shorthand for a format on stdout.
  std::string path = o.out;
  std::string format = o.format;
  if (path == "csv" || path == "json") {
    if (!format.empty() && format != path) throw InvalidArgument("--out " + path + " conflicts with --format " + format);
    format = path;
    path.clear();
  }
  if (format.empty()) format = path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? "json" : "csv";
  if (format != "csv" && format != "json") throw InvalidArgument("--format must be csv or json");

  const auto mode = o.mode == "greedy" ? widths::SparseMode::kGreedy : widths::SparseMode::kExhaustive;
  if (o.mode != "greedy" && o.mode != "exhaustive") throw InvalidArgument("--mode must be exhaustive or greedy");

  widths::WidthEstimate est;
  std::optional<std::int64_t> k_col, n_family;
  std::string command = "widths estimate --kind " + o.kind;
  const bool is_oracle = o.kind.rfind("oracle:", 0) == 0;
  const std::int64_t trials = o.trials.value_or(is_oracle ? 100000 : 2000);
  if (o.n < 1) throw InvalidDimension("--n must be >= 1");
  command += " --n " + std::to_string(o.n);

  if (o.kind == "base-psd") {
    est = widths::width_base_psd(o.n, trials, Seed{o.seed});
    k_col = o.n;
    n_family = 1;
  } else if (o.kind == "sparse-dual") {
    if (o.k < 1) throw InvalidArgument("--kind sparse-dual needs --k");
    est = widths::width_dual_base_sparse(o.n, o.k, trials, Seed{o.seed}, mode);
    k_col = o.k;
    n_family = static_cast<std::int64_t>(binomial(o.n, o.k));
    command += " --k " + std::to_string(o.k) + " --mode " + o.mode;
  } else if (o.kind == "general-dual") {
    if (o.family.empty() == (o.sparse_k == 0)) throw InvalidArgument("--kind general-dual needs exactly one of --family, --sparse-k");
    const auto family = load_family(o);
    if (family.ambient_dim() != o.n)
      throw InvalidArgument("family dimension " + std::to_string(family.ambient_dim()) + " does not match --n");
    est = widths::width_general_dual(family, trials, Seed{o.seed});
    k_col = family.rank();
    n_family = static_cast<std::int64_t>(family.size());
    if (o.sparse_k > 0) command += " --sparse-k " + std::to_string(o.sparse_k);
    else command += (o.k > 0 ? " --k " + std::to_string(o.k) : "") + " --family " + o.family;
  } else if (is_oracle) {
    est = widths::width_via_oracle(widths::oracles::by_name(o.kind.substr(7), o.n), trials, Seed{o.seed});
  } else {
    throw InvalidArgument("unknown --kind '" + o.kind + "' (expected base-psd, sparse-dual, general-dual, oracle:<name>)");
  }
  command += " --trials " + std::to_string(trials) + " --seed " + std::to_string(o.seed);
  if (o.keep_values) command += " --keep-values";
  command += " --format " + format;

  Output dest(out, path);
  auto& os = dest.stream();
  if (format == "json") {
    json j = header(command, o.seed);
    j["kind"] = o.kind;
    j["n"] = o.n;
    j["k"] = k_col ? json(*k_col) : json(nullptr);
    j["N"] = n_family ? json(*n_family) : json(nullptr);
    j["trials"] = est.trials;
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    if (o.keep_values && est.per_trial_values) j["per_trial_values"] = *est.per_trial_values;
    os << j.dump(2) << '\n';
  } else {
    write_csv_header(os, command, o.seed);
    os << "kind,n,k,N,trials,seed,mean,std_error\n";
    os << o.kind << ',' << o.n << ',' << (k_col ? std::to_string(*k_col) : "") << ','
       << (n_family ? std::to_string(*n_family) : "") << ',' << est.trials << ',' << o.seed << ','
       << fmt17(est.mean) << ',' << fmt17(est.std_error) << '\n';
    if (o.keep_values && est.per_trial_values) {
      os << "# per-trial values\n";
      for (double v : *est.per_trial_values) os << fmt17(v) << '\n';
    }
  }
  return kOk;
}

// --- cones -----------------------------------------------------------------

struct ConesOptions {
  std::string matrix;
  std::string family;
  std::int64_t sparse_k = 0;
  std::optional<double> tol;
  std::int64_t refute = 0;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cones_member(const ConesOptions& o, std::ostream& out) {
  if (o.matrix.empty()) throw InvalidArgument("cones member needs --matrix <symmat file>");
  std::ifstream in(o.matrix);
  if (!in) throw InvalidArgument("cannot read matrix file '" + o.matrix + "'");
  const SymMat x = read_symmat(in);
  const double tol = o.tol.value_or(default_psd_tolerance(x));
  if (!(tol >= 0.0)) throw DomainError("--tol must be nonnegative");
  if (o.family.empty() == (o.sparse_k == 0)) throw InvalidArgument("cones member needs exactly one of --family, --sparse-k");

  json j = header("cones member", o.seed);
  j["n"] = x.dim();
  j["tol"] = tol;
  j["psd"] = is_psd(x, tol);
  if (o.sparse_k > 0) {
    j["cone"] = "sparse";
    j["k"] = o.sparse_k;
    if (o.refute > 0) {
      const auto r = cones::sparse_kpsd_refute(x, o.sparse_k, tol, o.refute, Seed{o.seed});
      j["member"] = r.member;
      j["certain"] = r.certain;
      j["subsets_checked"] = r.subsets_checked;
      if (!r.member) j["violating_subset"] = r.violating_subset;
    } else {
      j["member"] = cones::sparse_kpsd_member(x, o.sparse_k, tol);
      j["certain"] = true;
    }
  } else {
    std::ifstream fin(o.family);
    if (!fin) throw InvalidArgument("cannot read family file '" + o.family + "'");
    const auto family = cones::read_conefam(fin);
    j["cone"] = "family";
    j["k"] = family.rank();
    j["N"] = family.size();
    j["member"] = cones::general_kpsd_member(x, family, tol);
    j["certain"] = true;
  }
  out << j.dump(2) << '\n';
  return kOk;
}

int cones_witness(const ConesOptions& o, std::ostream& out) {
  const auto [a, b] = cones::witness_coefficients(o.n, o.k);
  const SymMat w = cones::witness_matrix(o.n, o.k);
  const double eps = cones::eps_star_lower_sparse(o.n, o.k);
  json j = header("cones witness --n " + std::to_string(o.n) + " --k " + std::to_string(o.k), o.seed);
  j["n"] = o.n;
  j["k"] = o.k;
  j["a"] = a;
  j["b"] = b;
  j["trace"] = trace(w);
  j["eps_star"] = eps;
  j["lambda_min"] = lambda_min(w);
  if (binomial(o.n, o.k) <= kDefaultEnumerationCap) j["sparse_member"] = cones::sparse_kpsd_member(w, o.k);
  if (!o.out.empty()) {
    Output dest(out, o.out);
    write_symmat(dest.stream(), w);
    j["matrix_path"] = o.out;
  }
  out << j.dump(2) << '\n';
  return kOk;
}

int cones_eps_star(const ConesOptions& o, std::ostream& out) {
  json j = header("cones eps-star --n " + std::to_string(o.n) + " --k " + std::to_string(o.k), o.seed);
  j["n"] = o.n;
  j["k"] = o.k;
  j["value"] = cones::eps_star_lower_sparse(o.n, o.k);
  out << j.dump(2) << '\n';
  return kOk;
}

// --- hypercube -------------------------------------------------------------

struct VerifyOptions {
  std::string lemma;
  int n = 0;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  double lambda = std::numbers::e;
  double rho = 0.5;
  double p = 2.0;
  std::int64_t functions = 1;
  std::string out;
};

std::uint64_t derived_seed(std::uint64_t seed, std::int64_t index) {
  Rng rng(Seed{seed}, static_cast<std::uint64_t>(index));
  return rng();
}

json function_dump(const hypercube::HypercubeFunction& f) {
  if (f.n() > 10) return nullptr;
  return f.values();
}

int hypercube_verify(const VerifyOptions& o, std::ostream& out) {
  using namespace psdb::hypercube;
  if (o.n < 1) throw InvalidDimension("--n must be >= 1");
  std::string command = "hypercube verify --lemma " + o.lemma + " --n " + std::to_string(o.n) + " --trials " +
                        std::to_string(o.trials) + " --seed " + std::to_string(o.seed);
  json j;
  json failures = json::array();
  std::int64_t checked = 0;

  if (o.lemma == "moments") {
    const auto m = q_poly_moments(o.n);
    const std::int64_t expected = std::int64_t{2} * o.n * (o.n - 1);
    j = header(command, o.seed);
    j["mean"] = m.mean();
    j["second_moment"] = m.second_moment();
    j["expected"] = {0, expected};
    checked = 1;
    if (m.sum != 0 || m.sum_of_squares != (expected << o.n))
      failures.push_back({{"n", o.n}, {"mean", m.mean()}, {"second_moment", m.second_moment()}});
  } else if (o.lemma == "harmonic") {
    command += " --lambda " + fmt17(o.lambda);
    j = header(command, o.seed);
    j["lambda"] = o.lambda;
    j["bound"] = harmonic_bound(o.lambda);
    double worst = 0.0;
    for (std::int64_t t = 0; t < o.trials; ++t, ++checked) {
      const std::uint64_t fs = derived_seed(o.seed, t);
      const auto f = random_bounded_function(o.n, o.lambda, Seed{fs});
      const auto r = harmonic_bound_check(f, o.lambda);
      worst = std::max(worst, r.proj2_norm / r.bound);
      if (!r.holds)
        failures.push_back({{"trial", t}, {"function_seed", fs}, {"proj2_norm", r.proj2_norm}, {"bound", r.bound},
                            {"values", function_dump(f)}});
    }
    j["max_ratio_to_bound"] = worst;
  } else if (o.lemma == "hypercontractivity") {
    command += " --rho " + fmt17(o.rho) + " --p " + fmt17(o.p);
    j = header(command, o.seed);
    j["rho"] = o.rho;
    j["p"] = o.p;
    j["q"] = 1.0 + (o.p - 1.0) / (o.rho * o.rho);
    for (std::int64_t t = 0; t < o.trials; ++t, ++checked) {
      const std::uint64_t fs = derived_seed(o.seed, t);
      const auto f = random_function(o.n, Seed{fs});
      const auto r = hypercontractivity_check(f, o.rho, o.p);
      if (!r.holds)
        failures.push_back({{"trial", t}, {"function_seed", fs}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"values", function_dump(f)}});
    }
  } else if (o.lemma == "variance") {
    command += " --functions " + std::to_string(o.functions);
    j = header(command, o.seed);
    json reports = json::array();
    for (std::int64_t i = 0; i < o.functions; ++i, ++checked) {
      const std::uint64_t fs = derived_seed(o.seed, i);
      const auto f = random_function(o.n, Seed{fs});
      const auto r = variance_identity_check(f, o.trials, Seed{derived_seed(fs, -1)});
      json item{{"function_seed", fs},
                {"empirical_variance", r.empirical_variance},
                {"theoretical", r.theoretical},
                {"relative_error", r.relative_error},
                {"band", r.band}};
      reports.push_back(item);
      if (!r.within_band) {
        item["values"] = function_dump(f);
        failures.push_back(item);
      }
    }
    j["reports"] = reports;
  } else if (o.lemma == "maximal") {
    // --n is the number of Gaussians N
    j = header(command, o.seed);
    const auto r = maximal_check(o.n, o.trials, Seed{o.seed});
    j["N"] = o.n;
    j["empirical_mean_max"] = r.empirical_mean_max;
    j["std_error"] = r.std_error;
    j["bound"] = r.bound;
    checked = 1;
    if (!r.holds) failures.push_back({{"N", o.n}, {"empirical_mean_max", r.empirical_mean_max}, {"bound", r.bound}});
  } else {
    throw InvalidArgument("unknown --lemma '" + o.lemma +
                          "' (expected harmonic, hypercontractivity, moments, variance, maximal)");
  }
  j["lemma"] = o.lemma;
  j["checked"] = checked;
  j["failed"] = failures.size();
  j["passed"] = failures.empty();
  if (!failures.empty()) j["counterexamples"] = failures;
  Output dest(out, o.out);
  dest.stream() << j.dump(2) << '\n';
  return failures.empty() ? kOk : kVerificationFailed;
}

// --- figures ---------------------------------------------------------------

struct FigureOptions {
  std::string name;
  std::string out = ".";
  std::string grid;
  std::int64_t n = 1000000;
  double eps = 0.0;
};

int figures(const FigureOptions& o, std::ostream& out) {
  struct Job {
    std::string file;
    bounds::BoundCurve curve;
    std::string command;
  };
  std::vector<Job> jobs;
  const std::string base = "figures --name " + o.name;
  auto add = [&](const std::string& formula, const std::string& grid, const Params& params) {
    std::string command = "bounds curve --formula " + formula + " --grid " + grid;
    if (!params.empty()) command += " --params " + echo_params(params);
    for (auto& c : bounds::emit_curve(formula, bounds::Grid::parse(grid), params))
      jobs.push_back({o.name + "_" + c.label + ".csv", std::move(c), command});
  };

  if (o.name == "sparse-overview") {
    const std::string grid = o.grid.empty() ? "0.001:0.999:999" : o.grid;
    for (const char* f : {"xi", "zeta", "psi"}) add(f, grid, {});
  } else if (o.name == "delta-star") {
    add("delta_star", o.grid.empty() ? "0:2:201" : o.grid, {});
  } else if (o.name == "entropy-bracket") {
    const std::string grid = o.grid.empty() ? "0:1:1001" : o.grid;
    add("entropy_vs_bracket", grid, {{"eps", 0.0}});
    for (double eps : {0.2, 0.5}) {
      add("entropy_vs_bracket", grid, {{"eps", eps}});
      jobs.erase(jobs.end() - 2);  // entropy curve already emitted
    }
  } else if (o.name == "xc-lower") {
    const std::string grid = o.grid.empty() ? "1:1000:1000" : o.grid;
    const Params params{{"n", static_cast<double>(o.n)}, {"eps", o.eps}};
    add("thm1", grid, params);
    add("thm2", grid, params);
  } else {
    throw InvalidArgument("unknown figure '" + o.name + "' (expected sparse-overview, delta-star, entropy-bracket, xc-lower)");
  }

  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw InvalidArgument("cannot create output directory '" + o.out + "': " + ec.message());
  json files = json::array();
  for (const auto& job : jobs) {
    const fs::path path = fs::path(o.out) / job.file;
    Output dest(out, path.string());
    write_csv_header(dest.stream(), job.command, 0);
    dest.stream() << "# curve: " << job.curve.label << '\n';
    bounds::write_curve_csv(dest.stream(), job.curve);
    files.push_back({{"curve", job.curve.label}, {"path", path.string()}, {"points", job.curve.points.size()}});
  }
  json j = header(base, 0);
  j["figure"] = o.name;
  j["files"] = files;
  out << j.dump(2) << '\n';
  return kOk;
}

// --- config ----------------------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Expands --config <file>: each `key = value` line becomes `--key value`
// unless the flag is already on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InvalidArgument("--config needs a file");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config " + path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ParseError("config " + path + ":" + std::to_string(lineno) + ": empty key");
    const std::string flag = "--" + key;
    if (has_flag(args, flag)) continue;
    extra.push_back(flag);
    if (value != "true") extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

std::string version() { return PSDB_VERSION; }

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const Error& e) {
    err << "psdb: error: usage: " << e.what() << '\n';
    return kUsageError;
  }

  CLI::App app{"psdb: k-PSD approximation bounds, widths, cones and hypercube checks", "psdb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());
  std::function<int()> action;

  BoundsOptions bo;
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bounds and curves");
  bounds_cmd->require_subcommand(1);
  auto* eval_cmd = bounds_cmd->add_subcommand("eval", "evaluate one formula, JSON to stdout");
  eval_cmd->add_option("--formula", bo.formula, "formula name")->required();
  eval_cmd->add_option("--params", bo.params, "k=v[,k=v...]");
  eval_cmd->add_flag("--finite-n", bo.finite_n, "phi: also report the Monte Carlo width ratio");
  eval_cmd->add_option("--trials", bo.trials, "trials for --finite-n")->check(CLI::Range(2, 100000000));
  eval_cmd->add_option("--seed", bo.seed, "seed for --finite-n");
  eval_cmd->add_option("--out", bo.out, "write JSON here instead of stdout");
  eval_cmd->callback([&] { action = [&] { return bounds_eval(bo, out); }; });
  auto* curve_cmd = bounds_cmd->add_subcommand("curve", "sample a formula on a grid, CSV");
  curve_cmd->add_option("--formula", bo.formula, "curve name")->required();
  curve_cmd->add_option("--grid", bo.grid, "start:stop:steps")->required();
  curve_cmd->add_option("--params", bo.params, "k=v[,k=v...]");
  curve_cmd->add_flag("--finite-n", bo.finite_n, "phi: add a curve at the Monte Carlo width ratio");
  curve_cmd->add_option("--trials", bo.trials, "trials for --finite-n")->check(CLI::Range(2, 100000000));
  curve_cmd->add_option("--seed", bo.seed, "seed for --finite-n");
  curve_cmd->add_option("--out", bo.out, "CSV path; multi-curve formulas get a _<label> suffix");
  curve_cmd->callback([&] { action = [&] { return bounds_curve(bo, out); }; });

  WidthsOptions wo;
  auto* widths_cmd = app.add_subcommand("widths", "Monte Carlo Gaussian widths");
  widths_cmd->require_subcommand(1);
  auto* est_cmd = widths_cmd->add_subcommand("estimate", "estimate one width");
  est_cmd->add_option("--kind", wo.kind, "base-psd | sparse-dual | general-dual | oracle:<name>")->required();
  est_cmd->add_option("--n", wo.n, "matrix size, or dimension for oracles")->required();
  est_cmd->add_option("--k", wo.k, "subspace size");
  est_cmd->add_option("--family", wo.family, "conefam file, or random:<N>");
  est_cmd->add_option("--sparse-k", wo.sparse_k, "use the coordinate family of all k-subsets");
  est_cmd->add_option("--mode", wo.mode, "exhaustive | greedy (sparse-dual)");
  est_cmd->add_option("--trials", wo.trials, "Monte Carlo trials")->check(CLI::Range(std::int64_t{2}, std::int64_t{1000000000}));
  est_cmd->add_option("--seed", wo.seed, "u64 seed");
  est_cmd->add_option("--out", wo.out, "path, or csv|json for stdout");
  est_cmd->add_option("--format", wo.format, "csv | json");
  est_cmd->add_flag("--keep-values", wo.keep_values, "also emit per-trial values");
  est_cmd->callback([&] { action = [&] { return widths_estimate(wo, out); }; });

  ConesOptions co;
  auto* cones_cmd = app.add_subcommand("cones", "membership, witness construction");
  cones_cmd->require_subcommand(1);
  auto* member_cmd = cones_cmd->add_subcommand("member", "membership of a symmat file");
  member_cmd->add_option("--matrix", co.matrix, "symmat file")->required();
  member_cmd->add_option("--family", co.family, "conefam file");
  member_cmd->add_option("--sparse-k", co.sparse_k, "sparse k-PSD cone");
  member_cmd->add_option("--tol", co.tol, "PSD tolerance (default 1e-9 max(1, |X|_F))");
  member_cmd->add_option("--refute", co.refute, "sample this many random k-subsets instead of enumerating");
  member_cmd->add_option("--seed", co.seed, "seed for --refute");
  member_cmd->callback([&] { action = [&] { return cones_member(co, out); }; });
  auto* witness_cmd = cones_cmd->add_subcommand("witness", "sparse-cone witness G(a,b;n)");
  witness_cmd->add_option("--n", co.n)->required();
  witness_cmd->add_option("--k", co.k)->required();
  witness_cmd->add_option("--out", co.out, "also write the matrix as symmat");
  witness_cmd->callback([&] { action = [&] { return cones_witness(co, out); }; });
  auto* eps_cmd = cones_cmd->add_subcommand("eps-star", "(n - k) / (k - 1)");
  eps_cmd->add_option("--n", co.n)->required();
  eps_cmd->add_option("--k", co.k)->required();
  eps_cmd->callback([&] { action = [&] { return cones_eps_star(co, out); }; });

  VerifyOptions vo;
  auto* cube_cmd = app.add_subcommand("hypercube", "Fourier analysis on the hypercube");
  cube_cmd->require_subcommand(1);
  auto* verify_cmd = cube_cmd->add_subcommand("verify", "check a lemma numerically");
  verify_cmd->add_option("--lemma", vo.lemma, "harmonic | hypercontractivity | moments | variance | maximal")->required();
  verify_cmd->add_option("--n", vo.n, "cube dimension (maximal: number of Gaussians)")->required();
  verify_cmd->add_option("--trials", vo.trials, "random inputs, or Monte Carlo trials for variance/maximal")
      ->check(CLI::Range(std::int64_t{2}, std::int64_t{100000000}));
  verify_cmd->add_option("--seed", vo.seed, "u64 seed");
  verify_cmd->add_option("--lambda", vo.lambda, "harmonic: Lambda (default e)");
  verify_cmd->add_option("--rho", vo.rho, "hypercontractivity: rho");
  verify_cmd->add_option("--p", vo.p, "hypercontractivity: p");
  verify_cmd->add_option("--functions", vo.functions, "variance: number of random functions")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}));
  verify_cmd->add_option("--out", vo.out, "write JSON here instead of stdout");
  verify_cmd->callback([&] { action = [&] { return hypercube_verify(vo, out); }; });

  FigureOptions fo;
  auto* fig_cmd = app.add_subcommand("figures", "CSV series for the figures");
  fig_cmd->add_option("--name", fo.name, "sparse-overview | delta-star | entropy-bracket | xc-lower")->required();
  fig_cmd->add_option("--out", fo.out, "output directory");
  fig_cmd->add_option("--grid", fo.grid, "override the default grid");
  fig_cmd->add_option("--n", fo.n, "xc-lower: n");
  fig_cmd->add_option("--eps", fo.eps, "xc-lower: eps");
  fig_cmd->callback([&] { action = [&] { return figures(fo, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "psdb: error: usage: " << msg << '\n';
    return kUsageError;
  }

  try {
    return action ? action() : kUsageError;
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    const bool numerical = e.category() == Error::Category::kNumerical;
    err << "psdb: error: " << (numerical ? "numerical" : "domain") << ": " << msg << '\n';
    return numerical ? kNumericalError : kUsageError;
  } catch (const std::exception& e) {
    err << "psdb: error: numerical: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace psdb::cli
