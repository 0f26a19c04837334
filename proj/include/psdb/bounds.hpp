#pragma once

// Closed-form lower-bound curves for k-PSD approximations of the PSD cone,
// together with the special functions and root solves they need. All
// logarithms are natural.

#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace psdb::bounds {

// --- special functions ---------------------------------------------------

// -p ln p - (1-p) ln(1-p), with H(0) = H(1) = 0.
double binary_entropy(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Phi^{-1}(p) on (0, 1): rational initial guess refined by Halley steps.
double normal_quantile(double p);

// Quantile of chi^2 with one degree of freedom: (Phi^{-1}((1+p)/2))^2.
double chi2_quantile(double p);

// int_0^delta Q_chi2(1 - s) ds in closed form.
double sparse_integral(double delta);

// --- bound formulas ------------------------------------------------------

// [ratio / (1+eps) - sqrt(k/n)]_+^2
double phi(std::int64_t n, std::int64_t k, double eps, double width_ratio = 1.0);

// g_eps(delta) = [1/(1+eps) - sqrt(delta)]_+^2 - H(delta)
double critical_gap(double eps, double delta);

// Unique root of critical_gap(eps, .) on (0, 1/(1+eps)^2), by bisection.
double delta_star(double eps, double tol = 1e-9);

// 1/(sqrt(H(delta)) + sqrt(delta)) - 1, clamped at 0.
double xi(double delta);

// (1 - delta) / delta
double zeta(double delta);

// sparse_integral(delta)^(-1/2) - 1
double psi(double delta);

// sparse_integral(delta)^(-1/2) / 4
double avg_ratio_lower(double delta);

struct HansonWrightConstants {
  double c1 = 1.0;
  double c2 = 1.0;

  // max{ sqrt(c1 / (2 ln 3)), sqrt(2) c2 }
  double c() const;
};

struct QuadraticCoefficients {
  double alpha;
  double beta;
  double gamma;
};

// (z + alpha)(z + beta) >= gamma with z = ln N.
QuadraticCoefficients thm1_coefficients(std::int64_t n, std::int64_t k, double eps,
                                        const HansonWrightConstants& consts = {});

// Lower bound on ln xc for an eps-approximation; clamped at 0.
double thm1_xc_lower(std::int64_t n, std::int64_t k, double eps, const HansonWrightConstants& consts = {});

struct CubicCoefficients {
  double alpha;  // sqrt(n) / (22000 e (1+eps))
  double beta;
};

// z^3 + 3 beta z >= 2 alpha with z = sqrt(ln(9^k N)).
CubicCoefficients thm2_coefficients(std::int64_t n, std::int64_t k, double eps);

// Positive root z* of z^3 + 3 beta z - 2 alpha = 0.
double thm2_cubic_root(std::int64_t n, std::int64_t k, double eps);

// Lower bound on ln xc for an average eps-approximation; max{0, z*^2 - 2k ln 3}.
double thm2_xc_lower(std::int64_t n, std::int64_t k, double eps);

// Unique positive real root of z^3 + p z - q = 0 for q > 0.
double depressed_cubic_positive_root(double p, double q);

// T_+ + T_- with principal complex branches; real part of a real root.
std::complex<double> cardano_principal_sum(double p, double q);

// max{ sqrt(2 v ln N), 2 c ln N }
// count is real-valued so that N = e^m can be passed directly.
double maximal_bound(double v, double c, double count);

// --- curves ----------------------------------------------------------------

enum class PointFlag { kFinite, kPositiveInfinity, kDomainError };

std::string to_string(PointFlag flag);

struct CurvePoint {
  double abscissa;
  double value;
  PointFlag flag;
};

struct BoundCurve {
  std::string label;
  std::vector<CurvePoint> points;
};

struct Grid {
  double start = 0.0;
  double stop = 1.0;
  std::int64_t steps = 2;  // number of points, endpoints included

  std::vector<double> values() const;
  static Grid parse(const std::string& spec);  // "start:stop:steps"
};

// Fixed parameters for curve formulas: n, k, eps, ratio, c1, c2.
using CurveParams = std::map<std::string, double>;

// Curve names: phi, xi, zeta, psi, avg_ratio, thm1, thm2, delta_star,
// entropy_vs_bracket, sparse_integral. The abscissa is delta for
// xi/zeta/psi/avg_ratio/sparse_integral/entropy_vs_bracket, eps for
// delta_star and k for phi/thm1/thm2. entropy_vs_bracket yields two curves.
std::vector<BoundCurve> emit_curve(const std::string& which, const Grid& grid, const CurveParams& params = {});

const std::vector<std::string>& curve_names();

// CSV with columns abscissa,value,flag; 17 significant digits.
void write_curve_csv(std::ostream& os, const BoundCurve& curve);

}  // namespace psdb::bounds
