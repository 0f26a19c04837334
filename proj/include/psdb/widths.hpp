#pragma once

// Monte Carlo Gaussian widths w_G(S) = E h_S(g).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psdb/cones.hpp"
#include "psdb/linalg.hpp"

namespace psdb::widths {

using Vector = DenseVector<double>;

struct WidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  Seed seed;
  std::optional<std::vector<double>> per_trial_values;
};

// Mean and standard error (sample stddev / sqrt(trials)) of recorded values.
WidthEstimate summarize(std::vector<double> values, Seed seed, bool keep_values = true);

// Support function h_S of a set S in R^d. evaluate must be pure and
// thread-safe.
struct SupportOracle {
  Index dim = 0;
  std::function<double(const Vector&)> evaluate;
  std::string name;
};

namespace oracles {
SupportOracle l2_ball(Index d, double radius = 1.0);
// {x : sum (x_i / a_i)^2 <= 1}
SupportOracle ellipsoid(std::vector<double> semi_axes);
// {x : ||x||_1 <= radius}; h = radius * ||g||_inf
SupportOracle l1_ball(Index d, double radius);
// [-1, 1]^d; h = ||g||_1
SupportOracle cube(Index d);
// {x} finite point set given as columns.
SupportOracle point_set(DenseMatrix<double> points);
// S + t
SupportOracle translate(SupportOracle base, Vector t);
// Looks up l2-ball | ellipse | scaled-l1-ball | cube by name for dimension d.
SupportOracle by_name(const std::string& name, Index d);
}  // namespace oracles

// E lambda_1(G) for standard Gaussian G in S^n (= w_G of the PSD-cone base).
WidthEstimate width_base_psd(Index n, std::int64_t trials, Seed seed);

enum class SparseMode { kExhaustive, kGreedy };

// max over |I| = k of lambda_1(G_I). Greedy: best-single-index seed grown by
// best additions, then swap ascent, plus 20 random restarts; a lower bound
// on the exhaustive value.
double k_sparse_largest_eigenvalue(const SymMat& g, Index k, SparseMode mode,
                                   std::uint64_t cap = kDefaultEnumerationCap);

WidthEstimate width_dual_base_sparse(Index n, Index k, std::int64_t trials, Seed seed,
                                     SparseMode mode = SparseMode::kExhaustive);

// E max_i lambda_1(U_i^T G U_i)
WidthEstimate width_general_dual(const cones::ConeFamily& family, std::int64_t trials, Seed seed);

// sqrt(2k) + sqrt(2 ln N)
double general_dual_width_bound(Index k, std::size_t family_size);

// Throws OracleFailure carrying the direction if h_S(g) is not finite.
WidthEstimate width_via_oracle(const SupportOracle& oracle, std::int64_t trials, Seed seed);

struct ConcentrationReport {
  double width_estimate = 0.0;  // in-sample mean of h_S(g)
  double fraction_below = 0.0;  // h_S(g) < (1 - alpha) w
  double fraction_above = 0.0;  // h_S(g) > (1 + alpha) w
  double fraction = 0.0;        // either side
  double bound = 0.0;           // exp(-alpha^2 / (4 pi)), per side
};

ConcentrationReport concentration_check(const SupportOracle& oracle, double alpha, std::int64_t trials,
                                        Seed seed);

// E ||g||_2 for g ~ N(0, I_d): sqrt(2) Gamma((d+1)/2) / Gamma(d/2).
double kappa(Index d);

}  // namespace psdb::widths
