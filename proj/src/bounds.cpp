#include "psdb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psdb/error.hpp"

namespace psdb::bounds {

namespace {

const double kLog3 = std::log(3.0);

void check_nk(std::int64_t n, std::int64_t k) {
  if (k < 1 || k > n) throw InvalidArgument("bounds require 1 <= k <= n");
}

void check_eps(double eps) {
  if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

double phi(std::int64_t n, std::int64_t k, double eps, double width_ratio) {
  check_nk(n, k);
  check_eps(eps);
  if (!(width_ratio > 0.0 && width_ratio <= 1.0)) throw DomainError("width ratio must lie in (0, 1]");
  const double gap = positive_part(width_ratio / (1.0 + eps) -
                                   std::sqrt(static_cast<double>(k) / static_cast<double>(n)));
  return gap * gap;
}

double critical_gap(double eps, double delta) {
  const double bracket = positive_part(1.0 / (1.0 + eps) - std::sqrt(delta));
  return bracket * bracket - binary_entropy(delta);
}

double delta_star(double eps, double tol) {
  check_eps(eps);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double upper_limit = 1.0 / ((1.0 + eps) * (1.0 + eps));
  double lo = std::min(1e-12, upper_limit / 4.0);
  double hi = upper_limit - std::min(1e-12, upper_limit / 4.0);
  if (!(critical_gap(eps, lo) > 0.0 && critical_gap(eps, hi) < 0.0))
    throw NumericalFailure("delta*: no sign change on the bracket for eps=" + std::to_string(eps));
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (critical_gap(eps, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double xi(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("xi requires delta in (0, 1)");
  return positive_part(1.0 / (std::sqrt(binary_entropy(delta)) + std::sqrt(delta)) - 1.0);
}

double zeta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("zeta requires delta in (0, 1]");
  return (1.0 - delta) / delta;
}

double psi(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("psi requires delta in (0, 1]");
  return 1.0 / std::sqrt(sparse_integral(delta)) - 1.0;
}

double avg_ratio_lower(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("average ratio bound requires delta in (0, 1]");
  return 0.25 / std::sqrt(sparse_integral(delta));
}

double HansonWrightConstants::c() const {
  if (!(c1 > 0.0 && c2 > 0.0)) throw DomainError("Hanson-Wright constants must be positive");
  return std::max(std::sqrt(c1 / (2.0 * kLog3)), std::numbers::sqrt2 * c2);
}

QuadraticCoefficients thm1_coefficients(std::int64_t n, std::int64_t k, double eps,
                                        const HansonWrightConstants& consts) {
  check_nk(n, k);
  check_eps(eps);
  const double c = consts.c();
  const double nn = static_cast<double>(n);
  return {2.0 * static_cast<double>(k) * kLog3, 3.0 * std::log(nn) - std::log(8.0 * c * kLog3),
          (nn - 1.0) / (2.0 * std::numbers::e * c * (1.0 + eps))};
}

double thm1_xc_lower(std::int64_t n, std::int64_t k, double eps, const HansonWrightConstants& consts) {
  const auto [alpha, beta, gamma] = thm1_coefficients(n, k, eps, consts);
  const double half_diff = 0.5 * (alpha - beta);
  const double root_disc = std::sqrt(half_diff * half_diff + gamma);
  const double half_sum = 0.5 * (alpha + beta);
  // Larger root of z^2 + (alpha+beta) z + (alpha beta - gamma); the quotient
  // form avoids cancellation when alpha + beta > 0.
  const double z = half_sum > 0.0 ? (gamma - alpha * beta) / (half_sum + root_disc) : -half_sum + root_disc;
  return positive_part(z);
}

CubicCoefficients thm2_coefficients(std::int64_t n, std::int64_t k, double eps) {
  check_nk(n, k);
  check_eps(eps);
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double alpha = std::sqrt(nn) / (22000.0 * std::numbers::e * (1.0 + eps));
  const double log_arg = std::log(16.0 * (1.0 + eps)) + 0.5 * std::log(kk) + 1.5 * std::log(nn) -
                         std::log(5.0 * std::sqrt(2.0 * kLog3));
  return {alpha, (log_arg - 2.0 * kk * kLog3) / 3.0};
}

double thm2_cubic_root(std::int64_t n, std::int64_t k, double eps) {
  const auto [alpha, beta] = thm2_coefficients(n, k, eps);
  return depressed_cubic_positive_root(3.0 * beta, 2.0 * alpha);
}

double thm2_xc_lower(std::int64_t n, std::int64_t k, double eps) {
  const double z = thm2_cubic_root(n, k, eps);
  return positive_part(z * z - 2.0 * static_cast<double>(k) * kLog3);
}

double depressed_cubic_positive_root(double p, double q) {
  if (!(q > 0.0)) throw DomainError("depressed cubic root requires q > 0");
  if (!std::isfinite(p) || !std::isfinite(q)) throw DomainError("depressed cubic coefficients must be finite");
  double z;
  if (p == 0.0) {
    z = std::cbrt(q);
  } else {
    const double p3 = p / 3.0;
    const double h = 0.5 * q;
    const double disc = p3 * p3 * p3 + h * h;
    if (disc > 0.0) {
      // One real root. T_+ T_- = -p/3 and T_+^3 + T_-^3 = q, so
      // z = q / (T_+^2 + p/3 + T_-^2) avoids cancellation when p > 0.
      const double t_plus = std::cbrt(h + std::sqrt(disc));
      const double t_minus = -p3 / t_plus;
      z = p > 0.0 ? q / (t_plus * t_plus + p3 + t_minus * t_minus) : t_plus + t_minus;
    } else {
      // Three real roots (p < 0); the largest is the positive one.
      const double m = std::sqrt(-p3);
      const double arg = std::clamp(h / (m * m * m), -1.0, 1.0);
      z = 2.0 * m * std::cos(std::acos(arg) / 3.0);
    }
  }
  // Newton polish; f is increasing at the positive root.
  for (int it = 0; it < 3; ++it) {
    const double f = z * z * z + p * z - q;
    const double df = 3.0 * z * z + p;
    if (!(df > 0.0)) break;
    const double next = z - f / df;
    const double f_next = next * next * next + p * next - q;
    if (!(next > 0.0) || std::abs(f_next) >= std::abs(f)) break;
    z = next;
  }
  return z;
}

std::complex<double> cardano_principal_sum(double p, double q) {
  using C = std::complex<double>;
  const double p3 = p / 3.0;
  const double h = 0.5 * q;
  const double disc = p3 * p3 * p3 + h * h;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    return {std::cbrt(h + s) + std::cbrt(h - s), 0.0};
  }
  const C s = std::sqrt(C(disc, 0.0));
  return std::pow(C(h, 0.0) + s, 1.0 / 3.0) + std::pow(C(h, 0.0) - s, 1.0 / 3.0);
}

double maximal_bound(double v, double c, double count) {
  if (!(v > 0.0)) throw DomainError("maximal bound requires v > 0");
  if (!(c >= 0.0)) throw DomainError("maximal bound requires c >= 0");
  if (!(count >= 1.0)) throw DomainError("maximal bound requires N >= 1");
  const double log_n = std::log(count);
  return std::max(std::sqrt(2.0 * v * log_n), 2.0 * c * log_n);
}

}  // namespace psdb::bounds
