#pragma once

// Test-only reference computations. None of these call into the library's
// special functions; they are slow and simple on purpose.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Phi^{-1}(p) by bisection on erfc followed by a few guarded Newton steps.
inline double quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi_cdf(mid) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double dens = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (dens == 0.0) break;
    const double next = x - (phi_cdf(x) - p) / dens;
    if (std::abs(phi_cdf(next) - p) < std::abs(phi_cdf(x) - p)) x = next;
  }
  return x;
}

// Upper-tail chi^2_1 quantile Q(1 - s) written as the upper tail of |Z|:
// P(|Z| > t) = erfc(t / sqrt 2) = s, solved by bisection in t.
inline double chi2_upper(double s) {
  if (s >= 1.0) return 0.0;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > s ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return t * t;
}

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson_step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40);
}

// int_0^delta Q(1 - s) ds. The integrand blows up like 2 ln(1/s) at 0, so
// the range is cut geometrically: [delta/2, delta], [delta/4, delta/2], ...
// The leftover [0, delta 2^-60] contributes below 1e-15.
inline double sparse_integral_quadrature(double delta, double tol = 1e-12) {
  if (delta <= 0.0) return 0.0;
  double total = 0.0;
  double hi = delta;
  for (int j = 0; j < 60; ++j) {
    const double lo = hi / 2.0;
    total += adaptive_simpson(chi2_upper, lo, hi, tol / 64.0);
    hi = lo;
  }
  return total;
}

inline double entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

// sup { eps > 0 : H(delta) < [1/(1+eps) - sqrt(delta)]_+^2 }, or 0.
inline double xi_by_bisection(double delta) {
  const auto ok = [delta](double eps) {
    const double b = 1.0 / (1.0 + eps) - std::sqrt(delta);
    return b > 0.0 && entropy(delta) < b * b;
  };
  if (!ok(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (ok(hi)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

inline double delta_star_by_bisection(double eps) {
  const auto g = [eps](double d) {
    const double b = std::max(0.0, 1.0 / (1.0 + eps) - std::sqrt(d));
    return b * b - entropy(d);
  };
  double lo = 1e-15, hi = 1.0 / ((1.0 + eps) * (1.0 + eps));
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Positive root of z^3 + p z - q (q > 0) by bisection in long double.
inline double cubic_root_by_bisection(double p, double q) {
  const auto f = [=](long double z) { return z * z * z + (long double)p * z - (long double)q; };
  long double lo = 0.0L, hi = 1.0L;
  while (f(hi) < 0.0L) hi *= 2.0L;
  for (int i = 0; i < 300; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0L ? lo : hi) = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// coeff(S) = 2^-n sum_x f(x) chi_S(x), straight from the definition.
inline std::vector<double> naive_fourier(int n, const std::vector<double>& f) {
  const std::uint32_t size = 1U << n;
  std::vector<double> c(size, 0.0);
  for (std::uint32_t s = 0; s < size; ++s) {
    double acc = 0.0;
    for (std::uint32_t x = 0; x < size; ++x) {
      double chi = 1.0;
      for (int i = 0; i < n; ++i)
        if ((s >> i) & 1U) chi *= ((x >> i) & 1U) ? -1.0 : 1.0;
      acc += f[x] * chi;
    }
    c[s] = acc / size;
  }
  return c;
}

// Kolmogorov-Smirnov distance between two samples.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace oracle
