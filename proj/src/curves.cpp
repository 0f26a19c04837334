#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "psdb/bounds.hpp"
#include "psdb/error.hpp"

namespace psdb::bounds {

namespace {

double param(const CurveParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double required(const CurveParams& params, const std::string& key, const std::string& curve) {
  const auto it = params.find(key);
  if (it == params.end()) throw InvalidArgument("curve '" + curve + "' requires parameter '" + key + "'");
  return it->second;
}

std::int64_t as_integer(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || !std::isfinite(r)) throw DomainError("expected an integer abscissa");
  return static_cast<std::int64_t>(r);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundCurve evaluate(const std::string& label, const std::vector<double>& xs,
                    const std::function<double(double)>& f, const std::function<bool(double)>& is_pole = {}) {
  BoundCurve curve{label, {}};
  curve.points.reserve(xs.size());
  for (double x : xs) {
    if (is_pole && is_pole(x)) {
      curve.points.push_back({x, kInf, PointFlag::kPositiveInfinity});
      continue;
    }
    try {
      const double v = f(x);
      curve.points.push_back({x, v, std::isinf(v) && v > 0 ? PointFlag::kPositiveInfinity : PointFlag::kFinite});
    } catch (const DomainError&) {
      curve.points.push_back({x, std::numeric_limits<double>::quiet_NaN(), PointFlag::kDomainError});
    } catch (const InvalidArgument&) {
      curve.points.push_back({x, std::numeric_limits<double>::quiet_NaN(), PointFlag::kDomainError});
    }
  }
  return curve;
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string to_string(PointFlag flag) {
  switch (flag) {
    case PointFlag::kFinite:
      return "finite";
    case PointFlag::kPositiveInfinity:
      return "+inf";
    case PointFlag::kDomainError:
      return "domain-error";
  }
  return "unknown";
}

std::vector<double> Grid::values() const {
  if (steps < 1) throw InvalidArgument("grid needs at least one point");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw InvalidArgument("grid bounds must be finite");
  if (steps == 1) return {start};
  if (!(stop > start)) throw InvalidArgument("grid must be strictly increasing (start < stop)");
  std::vector<double> xs(static_cast<std::size_t>(steps));
  const double h = (stop - start) / static_cast<double>(steps - 1);
  for (std::int64_t i = 0; i < steps; ++i) xs[static_cast<std::size_t>(i)] = start + h * static_cast<double>(i);
  xs.back() = stop;
  return xs;
}

Grid Grid::parse(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? std::string::npos : spec.find(':', a + 1);
  if (b == std::string::npos) throw InvalidArgument("grid must be start:stop:steps, got '" + spec + "'");
  try {
    Grid g{std::stod(spec.substr(0, a)), std::stod(spec.substr(a + 1, b - a - 1)), std::stoll(spec.substr(b + 1))};
    g.values();
    return g;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidArgument("grid must be start:stop:steps, got '" + spec + "'");
  }
}

const std::vector<std::string>& curve_names() {
  static const std::vector<std::string> names{"phi", "xi", "zeta", "psi", "avg_ratio", "thm1", "thm2",
                                              "delta_star", "entropy_vs_bracket", "sparse_integral"};
  return names;
}

std::vector<BoundCurve> emit_curve(const std::string& which, const Grid& grid, const CurveParams& params) {
  const auto xs = grid.values();
  const auto at_zero = [](double x) { return x == 0.0; };
  if (which == "xi") return {evaluate("xi", xs, xi)};
  if (which == "zeta") return {evaluate("zeta", xs, zeta, at_zero)};
  if (which == "psi") return {evaluate("psi", xs, psi, at_zero)};
  if (which == "avg_ratio") return {evaluate("avg_ratio", xs, avg_ratio_lower, at_zero)};
  if (which == "sparse_integral") return {evaluate("sparse_integral", xs, sparse_integral)};
  if (which == "delta_star") {
    const double tol = param(params, "tol", 1e-9);
    return {evaluate("delta_star", xs, [tol](double eps) { return delta_star(eps, tol); })};
  }
  if (which == "entropy_vs_bracket") {
    const double eps = param(params, "eps", 0.0);
    return {evaluate("entropy", xs, binary_entropy),
            evaluate("bracket_eps=" + format_param(eps), xs, [eps](double d) {
              if (!(d >= 0.0 && d <= 1.0)) throw DomainError("delta must lie in [0, 1]");
              const double b = 1.0 / (1.0 + eps) - std::sqrt(d);
              return b > 0.0 ? b * b : 0.0;
            })};
  }
  if (which == "phi") {
    const auto n = as_integer(required(params, "n", which));
    const double eps = param(params, "eps", 0.0);
    const double ratio = param(params, "ratio", 1.0);
    return {evaluate("phi", xs, [=](double k) { return phi(n, as_integer(k), eps, ratio); })};
  }
  if (which == "thm1") {
    const auto n = as_integer(required(params, "n", which));
    const double eps = param(params, "eps", 0.0);
    const HansonWrightConstants consts{param(params, "c1", 1.0), param(params, "c2", 1.0)};
    return {evaluate("thm1", xs, [=](double k) { return thm1_xc_lower(n, as_integer(k), eps, consts); })};
  }
  if (which == "thm2") {
    const auto n = as_integer(required(params, "n", which));
    const double eps = param(params, "eps", 0.0);
    return {evaluate("thm2", xs, [=](double k) { return thm2_xc_lower(n, as_integer(k), eps); })};
  }
  throw InvalidArgument("unknown curve '" + which + "'");
}

void write_curve_csv(std::ostream& os, const BoundCurve& curve) {
  os << "abscissa,value,flag\n";
  char x[40], v[40];
  for (const auto& p : curve.points) {
    std::snprintf(x, sizeof x, "%.17g", p.abscissa);
    std::snprintf(v, sizeof v, "%.17g", p.value);
    os << x << ',' << v << ',' << to_string(p.flag) << '\n';
  }
}

}  // namespace psdb::bounds
