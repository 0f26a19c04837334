#include "psdb/widths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "psdb/parallel.hpp"

namespace psdb::widths {

namespace {

void require_trials(std::int64_t trials) {
  if (trials < 2) throw InvalidArgument("trials must be >= 2, got " + std::to_string(trials));
}

Vector gaussian_vector(Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector g(d);
  for (Index i = 0; i < d; ++i) g(i) = normal(rng);
  return g;
}

double lambda_max_of(const DenseMatrix<double>& dense, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  if (k == 1) return dense(idx[0], idx[0]);
  DenseMatrix<double> sub(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      sub(i, j) = dense(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return dense_lambda_max(sub);
}

// Best-improvement swap ascent over k-subsets; `in` is sorted on return.
double swap_ascent(const DenseMatrix<double>& dense, std::vector<Index>& in, double value) {
  const Index n = dense.rows();
  std::vector<char> member(static_cast<std::size_t>(n), 0);
  for (Index i : in) member[static_cast<std::size_t>(i)] = 1;
  while (true) {
    double best = value;
    std::size_t best_pos = 0;
    Index best_in = -1;
    for (std::size_t pos = 0; pos < in.size(); ++pos) {
      const Index old = in[pos];
      for (Index cand = 0; cand < n; ++cand) {
        if (member[static_cast<std::size_t>(cand)]) continue;
        in[pos] = cand;
        const double v = lambda_max_of(dense, in);
        if (v > best + 1e-14 * std::max(1.0, std::abs(best))) {
          best = v;
          best_pos = pos;
          best_in = cand;
        }
      }
      in[pos] = old;
    }
    if (best_in < 0) break;
    member[static_cast<std::size_t>(in[best_pos])] = 0;
    member[static_cast<std::size_t>(best_in)] = 1;
    in[best_pos] = best_in;
    value = best;
  }
  std::sort(in.begin(), in.end());
  return value;
}

double greedy_sparse(const DenseMatrix<double>& dense, Index k) {
  const Index n = dense.rows();
  // Seed at the largest diagonal entry, grow by the best addition.
  Index first = 0;
  for (Index i = 1; i < n; ++i)
    if (dense(i, i) > dense(first, first)) first = i;
  std::vector<Index> in{first};
  std::vector<char> member(static_cast<std::size_t>(n), 0);
  member[static_cast<std::size_t>(first)] = 1;
  double value = dense(first, first);
  while (static_cast<Index>(in.size()) < k) {
    double best = -std::numeric_limits<double>::infinity();
    Index best_cand = -1;
    for (Index cand = 0; cand < n; ++cand) {
      if (member[static_cast<std::size_t>(cand)]) continue;
      in.push_back(cand);
      const double v = lambda_max_of(dense, in);
      in.pop_back();
      if (v > best) {
        best = v;
        best_cand = cand;
      }
    }
    in.push_back(best_cand);
    member[static_cast<std::size_t>(best_cand)] = 1;
    value = best;
  }
  value = swap_ascent(dense, in, value);

  constexpr int kRestarts = 20;
  Rng rng(Seed{0x5eed5eedULL ^ static_cast<std::uint64_t>(n * 1315423911ULL + static_cast<std::uint64_t>(k))});
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (int r = 0; r < kRestarts; ++r) {
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Index> start(all.begin(), all.begin() + k);
    std::sort(start.begin(), start.end());
    value = std::max(value, swap_ascent(dense, start, lambda_max_of(dense, start)));
  }
  return value;
}

}  // namespace

WidthEstimate summarize(std::vector<double> values, Seed seed, bool keep_values) {
  WidthEstimate est;
  est.trials = static_cast<std::int64_t>(values.size());
  est.seed = seed;
  if (values.empty()) return est;
  const double count = static_cast<double>(values.size());
  est.mean = pairwise_sum(values) / count;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(),
                   [&](double v) { return (v - est.mean) * (v - est.mean); });
    const double var = pairwise_sum(sq) / (count - 1.0);
    est.std_error = std::sqrt(var / count);
  }
  if (keep_values) est.per_trial_values = std::move(values);
  return est;
}

namespace oracles {

SupportOracle l2_ball(Index d, double radius) {
  return {d, [radius](const Vector& g) { return radius * g.norm(); }, "l2-ball"};
}

SupportOracle ellipsoid(std::vector<double> semi_axes) {
  const Index d = static_cast<Index>(semi_axes.size());
  Vector a = Eigen::Map<const Vector>(semi_axes.data(), d);
  return {d, [a](const Vector& g) { return g.cwiseProduct(a).norm(); }, "ellipsoid"};
}

SupportOracle l1_ball(Index d, double radius) {
  return {d, [radius](const Vector& g) { return radius * g.cwiseAbs().maxCoeff(); }, "l1-ball"};
}

SupportOracle cube(Index d) {
  return {d, [](const Vector& g) { return g.cwiseAbs().sum(); }, "cube"};
}

SupportOracle point_set(DenseMatrix<double> points) {
  const Index d = points.rows();
  return {d, [p = std::move(points)](const Vector& g) { return (g.transpose() * p).maxCoeff(); }, "points"};
}

SupportOracle translate(SupportOracle base, Vector t) {
  if (t.size() != base.dim) throw InvalidArgument("translation has wrong dimension");
  auto name = base.name + "+t";
  return {base.dim, [b = std::move(base.evaluate), t = std::move(t)](const Vector& g) { return b(g) + g.dot(t); },
          std::move(name)};
}

SupportOracle by_name(const std::string& name, Index d) {
  if (name == "l2-ball") return l2_ball(d);
  if (name == "ellipse") return ellipsoid({2.0, 1.0});
  if (name == "scaled-l1-ball") return l1_ball(d, std::sqrt(static_cast<double>(d)));
  if (name == "cube") return cube(d);
  throw InvalidArgument("unknown oracle '" + name + "' (expected l2-ball, ellipse, scaled-l1-ball, cube)");
}

}  // namespace oracles

WidthEstimate width_base_psd(Index n, std::int64_t trials, Seed seed) {
  require_trials(trials);
  if (n < 1) throw InvalidDimension("dimension must be >= 1");
  return summarize(run_trials(trials, seed,
                              [n](std::int64_t, Rng& rng) {
                                return lambda_max(sample_standard_gaussian_sym(n, rng));
                              }),
                   seed);
}

double k_sparse_largest_eigenvalue(const SymMat& g, Index k, SparseMode mode, std::uint64_t cap) {
  const Index n = g.dim();
  if (k < 1 || k > n) throw InvalidArgument("k must satisfy 1 <= k <= n");
  const DenseMatrix<double> dense = g.dense();
  if (k == n) return dense_lambda_max(dense);
  if (k == 1) return dense.diagonal().maxCoeff();
  if (mode == SparseMode::kGreedy) return greedy_sparse(dense, k);
  require_enumerable(n, k, cap, "exhaustive k-sparse eigenvalue");
  double best = -std::numeric_limits<double>::infinity();
  for_each_combination(n, k, [&](const std::vector<Index>& idx) {
    best = std::max(best, lambda_max_of(dense, idx));
    return true;
  });
  return best;
}

WidthEstimate width_dual_base_sparse(Index n, Index k, std::int64_t trials, Seed seed, SparseMode mode) {
  require_trials(trials);
  if (k < 1 || k > n) throw InvalidArgument("k must satisfy 1 <= k <= n");
  if (mode == SparseMode::kExhaustive) require_enumerable(n, k, kDefaultEnumerationCap, "sparse dual width");
  return summarize(run_trials(trials, seed,
                              [=](std::int64_t, Rng& rng) {
                                return k_sparse_largest_eigenvalue(sample_standard_gaussian_sym(n, rng), k,
                                                                   mode);
                              }),
                   seed);
}

WidthEstimate width_general_dual(const cones::ConeFamily& family, std::int64_t trials, Seed seed) {
  require_trials(trials);
  const Index n = family.ambient_dim();
  return summarize(run_trials(trials, seed,
                              [&](std::int64_t, Rng& rng) {
                                const DenseMatrix<double> g = sample_standard_gaussian_sym(n, rng).dense();
                                double best = -std::numeric_limits<double>::infinity();
                                for (const auto& u : family.bases())
                                  best = std::max(best, dense_lambda_max(u.compress(g)));
                                return best;
                              }),
                   seed);
}

double general_dual_width_bound(Index k, std::size_t family_size) {
  return std::sqrt(2.0 * static_cast<double>(k)) + std::sqrt(2.0 * std::log(static_cast<double>(family_size)));
}

WidthEstimate width_via_oracle(const SupportOracle& oracle, std::int64_t trials, Seed seed) {
  require_trials(trials);
  if (oracle.dim < 1 || !oracle.evaluate) throw InvalidArgument("support oracle is not initialized");
  return summarize(run_trials(trials, seed,
                              [&](std::int64_t, Rng& rng) {
                                const Vector g = gaussian_vector(oracle.dim, rng);
                                const double h = oracle.evaluate(g);
                                if (!std::isfinite(h)) {
                                  std::ostringstream os;
                                  os << "support oracle '" << oracle.name << "' returned " << h
                                     << " at direction [" << g.transpose() << "]";
                                  throw OracleFailure(os.str());
                                }
                                return h;
                              }),
                   seed);
}

ConcentrationReport concentration_check(const SupportOracle& oracle, double alpha, std::int64_t trials,
                                        Seed seed) {
  if (!(alpha >= 0)) throw DomainError("alpha must be nonnegative");
  const auto est = width_via_oracle(oracle, trials, seed);
  ConcentrationReport r;
  r.width_estimate = est.mean;
  std::int64_t below = 0, above = 0;
  for (double h : *est.per_trial_values) {
    if (h < (1.0 - alpha) * est.mean) ++below;
    if (h > (1.0 + alpha) * est.mean) ++above;
  }
  const double count = static_cast<double>(est.trials);
  r.fraction_below = static_cast<double>(below) / count;
  r.fraction_above = static_cast<double>(above) / count;
  r.fraction = static_cast<double>(below + above) / count;
  r.bound = std::exp(-alpha * alpha / (4.0 * std::numbers::pi));
  return r;
}

double kappa(Index d) {
  if (d < 1) throw InvalidDimension("dimension must be >= 1");
  const double dd = static_cast<double>(d);
  return std::sqrt(2.0) * std::exp(std::lgamma((dd + 1.0) / 2.0) - std::lgamma(dd / 2.0));
}

}  // namespace psdb::widths
