#include "psdb/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "psdb/bounds.hpp"
#include "psdb/parallel.hpp"
#include "psdb/widths.hpp"

namespace psdb::hypercube {

namespace {

void check_n(int n, int cap = kMaxTransformDim) {
  if (n < 1 || n > cap)
    throw SizeLimit("hypercube dimension must satisfy 1 <= n <= " + std::to_string(cap) + ", got " +
                    std::to_string(n));
}

void walsh_hadamard(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

double pairwise_mean(const std::vector<double>& v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace

Vertex Vertex::from_coordinates(const std::vector<int>& x) {
  std::uint32_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == -1) idx |= 1U << i;
    else if (x[i] != 1) throw InvalidArgument("vertex coordinates must be +1 or -1");
  }
  return {idx};
}

int vertex_inner(Vertex x, Vertex y, int n) {
  const std::uint32_t mask = n >= 32 ? ~0U : ((1U << n) - 1U);
  return n - 2 * std::popcount((x.index ^ y.index) & mask);
}

HypercubeFunction::HypercubeFunction(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  check_n(n);
  if (values_.size() != (std::size_t{1} << n))
    throw InvalidDimension("hypercube function needs exactly 2^" + std::to_string(n) + " values, got " +
                           std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("hypercube function values must be finite");
}

HypercubeFunction HypercubeFunction::constant(int n, double c) {
  check_n(n);
  return HypercubeFunction(n, std::vector<double>(std::size_t{1} << n, c));
}

HypercubeFunction HypercubeFunction::character(int n, std::uint32_t mask) {
  return tabulate(n, [mask](Vertex x) { return std::popcount(mask & x.index) % 2 ? -1.0 : 1.0; });
}

double HypercubeFunction::mean() const { return pairwise_mean(values_); }

FourierExpansion::FourierExpansion(int n, std::vector<double> coefficients)
    : n_(n), coefficients_(std::move(coefficients)) {
  check_n(n);
  if (coefficients_.size() != (std::size_t{1} << n)) throw InvalidDimension("expansion has the wrong length");
}

double FourierExpansion::squared_norm() const {
  std::vector<double> sq(coefficients_.size());
  std::transform(coefficients_.begin(), coefficients_.end(), sq.begin(), [](double c) { return c * c; });
  return pairwise_sum(sq);
}

FourierExpansion fourier_transform(const HypercubeFunction& f) {
  std::vector<double> v = f.values();
  walsh_hadamard(v);
  const double scale = 1.0 / static_cast<double>(v.size());
  for (double& c : v) c *= scale;
  return FourierExpansion(f.n(), std::move(v));
}

HypercubeFunction inverse_transform(const FourierExpansion& c) {
  std::vector<double> v = c.coefficients();
  walsh_hadamard(v);
  return HypercubeFunction(c.n(), std::move(v));
}

HypercubeFunction project_degree(const HypercubeFunction& f, int d) {
  if (d < 0) throw InvalidArgument("degree must be nonnegative");
  if (d > f.n()) return HypercubeFunction::constant(f.n(), 0.0);
  std::vector<double> c = fourier_transform(f).coefficients();
  for (std::uint32_t s = 0; s < c.size(); ++s)
    if (std::popcount(s) != d) c[s] = 0.0;
  return inverse_transform(FourierExpansion(f.n(), std::move(c)));
}

HypercubeFunction noise_operator(const HypercubeFunction& f, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("noise parameter must lie in [0, 1]");
  if (rho == 1.0) return f;
  std::vector<double> c = fourier_transform(f).coefficients();
  std::vector<double> powers(static_cast<std::size_t>(f.n()) + 1, 1.0);
  for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * rho;
  for (std::uint32_t s = 0; s < c.size(); ++s) c[s] *= powers[static_cast<std::size_t>(std::popcount(s))];
  return inverse_transform(FourierExpansion(f.n(), std::move(c)));
}

double norm_p(const HypercubeFunction& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("norm exponent must satisfy p >= 1");
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  std::vector<double> pw(f.size());
  std::transform(f.values().begin(), f.values().end(), pw.begin(),
                 [&](double v) { return std::pow(std::abs(v) / m, p); });
  return m * std::pow(pairwise_mean(pw), 1.0 / p);
}

HypercontractivityReport hypercontractivity_check(const HypercubeFunction& f, double rho, double p) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("hypercontractivity requires 0 < rho <= 1");
  if (!(p >= 1.0)) throw DomainError("hypercontractivity requires p >= 1");
  HypercontractivityReport r{};
  r.q = 1.0 + (p - 1.0) / (rho * rho);
  r.lhs = norm_p(noise_operator(f, rho), r.q);
  r.rhs = norm_p(f, p);
  r.holds = r.lhs <= r.rhs + 1e-12 * std::max(1.0, r.rhs);
  return r;
}

double harmonic_bound(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("Lambda must be positive");
  return lambda < std::numbers::e ? lambda : std::numbers::e * std::log(lambda);
}

HarmonicReport harmonic_bound_check(const HypercubeFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("harmonic bound: Lambda must be positive");
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  if (*lo < 0.0) throw PreconditionError("harmonic bound: f must be nonnegative (min " + std::to_string(*lo) + ")");
  if (*hi > lambda)
    throw PreconditionError("harmonic bound: f must not exceed Lambda (max " + std::to_string(*hi) + ")");
  const double mean = f.mean();
  if (mean > 1.0 + 1e-12) throw PreconditionError("harmonic bound: E f must be <= 1 (got " + std::to_string(mean) + ")");
  HarmonicReport r{};
  r.proj2_norm = norm_p(project_degree(f, 2), 2.0);
  r.bound = harmonic_bound(lambda);
  r.holds = r.proj2_norm <= r.bound + 1e-12;
  return r;
}

SymMat proj2_quadratic_form(const HypercubeFunction& f) {
  const auto c = fourier_transform(f);
  const int n = f.n();
  return SymMat::generate(n, [&](Index i, Index j) {
    return i == j ? 0.0 : 0.5 * c[(1U << i) | (1U << j)];
  });
}

double slack_value(Vertex x, Vertex y, int n, double eps) {
  if (n < 1 || n > 31) throw InvalidArgument("slack_value requires 1 <= n <= 31");
  if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
  const double ip = vertex_inner(x, y, n);
  return (ip * ip / n + eps) / (1.0 + eps);
}

double q_poly(Vertex x, Vertex y, int n) {
  const double ip = vertex_inner(x, y, n);
  return ip * ip - n;
}

double pairing_with_q(const HypercubeFunction& f, Vertex y) {
  const int n = f.n();
  std::vector<double> terms(f.size());
  for (std::uint32_t x = 0; x < terms.size(); ++x) terms[x] = f.values()[x] * q_poly(Vertex{x}, y, n);
  return pairwise_mean(terms);
}

double QMoments::mean() const { return std::ldexp(static_cast<double>(sum), -log2_denominator); }
double QMoments::second_moment() const { return std::ldexp(static_cast<double>(sum_of_squares), -log2_denominator); }

QMoments q_poly_moments(int n, std::optional<Vertex> y) {
  check_n(n, 20);
  const Vertex yy = y.value_or(Vertex{0});
  QMoments m{0, 0, n};
  for (std::uint32_t x = 0; x < (1U << n); ++x) {
    const std::int64_t ip = vertex_inner(Vertex{x}, yy, n);
    const std::int64_t q = ip * ip - n;
    m.sum += q;
    m.sum_of_squares += q * q;
  }
  return m;
}

VarianceReport variance_identity_check(const HypercubeFunction& f, std::int64_t trials, Seed seed) {
  const int n = f.n();
  check_n(n, kMaxEnumerationDim);
  if (trials < 2) throw InvalidArgument("trials must be >= 2");
  // E_x[f(x) x_i x_j] by enumeration.
  DenseMatrix<double> moments = DenseMatrix<double>::Zero(n, n);
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    const Vertex v{x};
    const double fx = f.values()[x];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) moments(i, j) += fx * v.coordinate(i) * v.coordinate(j);
  }
  moments /= static_cast<double>(f.size());
  const SymMat moment_sym = SymMat::from_upper(moments);

  const auto samples = run_trials(trials, seed, [&](std::int64_t, Rng& rng) {
    const SymMat g0 = project_traceless(sample_standard_gaussian_sym(n, rng));
    return -inner(g0, moment_sym);
  });
  const auto est = widths::summarize(samples, seed, false);
  VarianceReport r{};
  r.empirical_variance = est.std_error * est.std_error * static_cast<double>(trials);
  const double p2 = norm_p(project_degree(f, 2), 2.0);
  r.theoretical = 2.0 * p2 * p2;
  r.band = 5.0 * std::sqrt(2.0 / static_cast<double>(trials));
  r.relative_error = r.theoretical > 0.0 ? std::abs(r.empirical_variance - r.theoretical) / r.theoretical
                                         : std::abs(r.empirical_variance);
  r.within_band = r.theoretical > 0.0 ? r.relative_error <= r.band : r.empirical_variance <= 1e-20;
  return r;
}

SharpFlatSplit sharp_flat_split(const HypercubeFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("Lambda must be positive");
  std::vector<double> sharp(f.size(), 0.0), flat(f.size(), 0.0);
  std::size_t support = 0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double v = f.values()[x];
    if (v > lambda) {
      sharp[x] = v;
      ++support;
    } else {
      flat[x] = v;
    }
  }
  return {HypercubeFunction(f.n(), std::move(sharp)), HypercubeFunction(f.n(), std::move(flat)),
          static_cast<double>(support) / static_cast<double>(f.size())};
}

MaximalReport maximal_check(std::int64_t count, std::int64_t trials, Seed seed) {
  if (count < 1) throw InvalidArgument("N must be >= 1");
  if (trials < 2) throw InvalidArgument("trials must be >= 2");
  const auto est = widths::summarize(run_trials(trials, seed,
                                                [count](std::int64_t, Rng& rng) {
                                                  std::normal_distribution<double> normal;
                                                  double best = -std::numeric_limits<double>::infinity();
                                                  for (std::int64_t i = 0; i < count; ++i)
                                                    best = std::max(best, normal(rng));
                                                  return best;
                                                }),
                                     seed, false);
  MaximalReport r{};
  r.empirical_mean_max = est.mean;
  r.std_error = est.std_error;
  r.bound = bounds::maximal_bound(1.0, 0.0, static_cast<double>(count));
  r.holds = r.empirical_mean_max <= r.bound + 3.0 * r.std_error;
  return r;
}

HypercubeFunction random_function(int n, Seed seed) {
  check_n(n);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(std::size_t{1} << n);
  for (double& x : v) x = normal(rng);
  return HypercubeFunction(n, std::move(v));
}

HypercubeFunction random_bounded_function(int n, double lambda, Seed seed) {
  check_n(n);
  if (!(lambda > 0.0)) throw DomainError("Lambda must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // g(x) = c0 + sum_i a_i x_i + sum_{i<j} b_ij x_i x_j, scaled so that the
  // clip at 0 and 1 is active on a random fraction of the cube.
  const double c0 = unit(rng);
  std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n * n));
  for (double& x : a) x = normal(rng) / std::sqrt(static_cast<double>(n));
  for (double& x : b) x = normal(rng) / static_cast<double>(n);
  const double spread = std::exp(2.0 * unit(rng));
  auto f = HypercubeFunction::tabulate(n, [&](Vertex x) {
    double g = c0;
    for (int i = 0; i < n; ++i) {
      g += a[static_cast<std::size_t>(i)] * x.coordinate(i);
      for (int j = i + 1; j < n; ++j) g += b[static_cast<std::size_t>(i * n + j)] * x.coordinate(i) * x.coordinate(j);
    }
    return lambda * std::clamp(spread * g, 0.0, 1.0);
  });
  const double mean = f.mean();
  if (mean <= 1.0) return f;
  std::vector<double> v = f.values();
  for (double& x : v) x /= mean;
  return HypercubeFunction(n, std::move(v));
}

void write_hfun(std::ostream& os, const HypercubeFunction& f) {
  os << f.n() << '\n';
  char buf[40];
  for (double v : f.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << '\n';
  }
}

HypercubeFunction read_hfun(std::istream& is) {
  std::string first;
  if (!(is >> first)) throw ParseError("hfun: missing header");
  if (first == "hfun") {
    std::string version;
    is >> version;
    if (version != "v1") throw ParseError("hfun: unsupported version '" + version + "'");
    if (!(is >> first)) throw ParseError("hfun: missing header");
  }
  int n = 0;
  try {
    n = std::stoi(first);
  } catch (const std::exception&) {
    throw ParseError("hfun: bad header '" + first + "'");
  }
  check_n(n);
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v)
    if (!(is >> x)) throw ParseError("hfun: expected " + std::to_string(v.size()) + " values");
  std::string extra;
  if (is >> extra) throw ParseError("hfun: trailing data '" + extra + "'");
  return HypercubeFunction(n, std::move(v));
}

}  // namespace psdb::hypercube
