#pragma once

// Exact Fourier analysis on the hypercube {-1, 1}^n.
//
// Vertex convention: bit b of a vertex index encodes coordinate x_b, with a
// clear bit meaning +1 and a set bit meaning -1. Fourier coefficients are
// indexed by subset masks S (bit i set <=> i in S), so
// chi_S(x) = (-1)^popcount(S & x).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psdb/linalg.hpp"
#include "psdb/rng.hpp"

namespace psdb::hypercube {

inline constexpr int kMaxTransformDim = 24;
inline constexpr int kMaxEnumerationDim = 14;

struct Vertex {
  std::uint32_t index = 0;

  int coordinate(int i) const noexcept { return (index >> i) & 1U ? -1 : 1; }
  static Vertex from_coordinates(const std::vector<int>& x);
  friend bool operator==(Vertex, Vertex) = default;
};

// <x, y> for x, y in {-1, 1}^n.
int vertex_inner(Vertex x, Vertex y, int n);

class HypercubeFunction {
 public:
  HypercubeFunction(int n, std::vector<double> values);

  static HypercubeFunction constant(int n, double c);
  // chi_S
  static HypercubeFunction character(int n, std::uint32_t mask);

  template <typename F>
  static HypercubeFunction tabulate(int n, F&& f) {
    std::vector<double> v(std::size_t{1} << n);
    for (std::uint32_t x = 0; x < v.size(); ++x) v[x] = f(Vertex{x});
    return HypercubeFunction(n, std::move(v));
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator()(Vertex x) const { return values_[x.index]; }
  const std::vector<double>& values() const noexcept { return values_; }

  double mean() const;

 private:
  int n_;
  std::vector<double> values_;
};

class FourierExpansion {
 public:
  FourierExpansion(int n, std::vector<double> coefficients);

  int n() const noexcept { return n_; }
  double operator[](std::uint32_t mask) const { return coefficients_[mask]; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  // sum_S coeff(S)^2
  double squared_norm() const;

 private:
  int n_;
  std::vector<double> coefficients_;
};

// coeff(S) = E_x[f(x) chi_S(x)], by the fast Walsh-Hadamard butterfly.
FourierExpansion fourier_transform(const HypercubeFunction& f);
HypercubeFunction inverse_transform(const FourierExpansion& c);

// Keeps only coefficients with |S| = d; zero when d > n.
HypercubeFunction project_degree(const HypercubeFunction& f, int d);

// T_rho f: multiplies degree-k coefficients by rho^k.
HypercubeFunction noise_operator(const HypercubeFunction& f, double rho);

// (E |f|^p)^(1/p)
double norm_p(const HypercubeFunction& f, double p);

struct HypercontractivityReport {
  double lhs;  // ||T_rho f||_q
  double rhs;  // ||f||_p
  double q;    // 1 + (p - 1) / rho^2
  bool holds;
};
HypercontractivityReport hypercontractivity_check(const HypercubeFunction& f, double rho, double p);

struct HarmonicReport {
  double proj2_norm;
  double bound;  // Lambda if Lambda < e, else e ln Lambda
  bool holds;
};
// Requires 0 <= f <= Lambda pointwise and E f <= 1; throws PreconditionError
// naming the violated constraint otherwise.
HarmonicReport harmonic_bound_check(const HypercubeFunction& f, double lambda);
double harmonic_bound(double lambda);

// Zero-diagonal A with x^T A x = proj_2 f(x) on every vertex;
// A_ij = E[x_i x_j f(x)] / 2.
SymMat proj2_quadratic_form(const HypercubeFunction& f);

// (1/(1+eps)) ((x^T y)^2 / n + eps)
double slack_value(Vertex x, Vertex y, int n, double eps);

// q_y(x) = (x^T y)^2 - n
double q_poly(Vertex x, Vertex y, int n);

// <f, q_y>_mu = E_x[f(x) q_y(x)] by enumeration over x.
double pairing_with_q(const HypercubeFunction& f, Vertex y);

struct QMoments {
  // Exact sums over all 2^n vertices; the moments are sum / 2^n.
  std::int64_t sum;
  std::int64_t sum_of_squares;
  int log2_denominator;

  double mean() const;
  double second_moment() const;
};
// E_x[q_y], E_x[q_y^2] by exact integer enumeration; y defaults to all-ones.
QMoments q_poly_moments(int n, std::optional<Vertex> y = std::nullopt);

struct VarianceReport {
  double empirical_variance;
  double theoretical;        // 2 ||proj_2 f||_2^2
  double relative_error;     // |emp - theo| / theo (or |emp| when theo = 0)
  double band;               // 5 sqrt(2 / trials)
  bool within_band;
};
// Samples G_0 = project_traceless(G) and computes <f, -x^T G_0 x>_mu per
// trial from the enumerated moment matrix E_x[f(x) x x^T].
VarianceReport variance_identity_check(const HypercubeFunction& f, std::int64_t trials, Seed seed);

struct SharpFlatSplit {
  HypercubeFunction sharp;  // f where f > Lambda, else 0
  HypercubeFunction flat;   // f where f <= Lambda, else 0
  double support_fraction;  // |supp sharp| / 2^n
};
SharpFlatSplit sharp_flat_split(const HypercubeFunction& f, double lambda);

struct MaximalReport {
  double empirical_mean_max;  // E max of N iid N(0, 1)
  double std_error;
  double bound;               // maximal_bound(1, 0, N)
  bool holds;                 // empirical <= bound + 3 std_error
};
MaximalReport maximal_check(std::int64_t count, std::int64_t trials, Seed seed);

// Random tables for property tests.
HypercubeFunction random_function(int n, Seed seed);
// Lambda * clip(g, 0, 1) for a random degree <= 2 polynomial g, rescaled so
// that E f <= 1.
HypercubeFunction random_bounded_function(int n, double lambda, Seed seed);

void write_hfun(std::ostream& os, const HypercubeFunction& f);
HypercubeFunction read_hfun(std::istream& is);

}  // namespace psdb::hypercube
