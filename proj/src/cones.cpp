#include "psdb/cones.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace psdb::cones {

double orthonormality_defect(const Matrix& u) {
  const Matrix gram = u.transpose() * u;
  return (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

namespace {

Matrix orthonormalize(const Matrix& u) {
  Eigen::HouseholderQR<Matrix> qr(u);
  const Matrix r = qr.matrixQR().topRows(u.cols()).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  for (Index i = 0; i < u.cols(); ++i) {
    if (std::abs(r(i, i)) <= 1e-12 * scale) throw InvalidArgument("subspace basis is rank deficient");
  }
  Matrix q = qr.householderQ() * Matrix::Identity(u.rows(), u.cols());
  // Keep the orientation of the input columns.
  for (Index i = 0; i < u.cols(); ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

std::vector<Index> random_subset(Index n, Index k, Rng& rng) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  // Partial Fisher-Yates.
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

void check_k(Index n, Index k) {
  if (k < 1 || k > n)
    throw InvalidArgument("k must satisfy 1 <= k <= n (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

bool submatrix_psd(const Matrix& dense, const std::vector<Index>& idx, double tol) {
  const Index k = static_cast<Index>(idx.size());
  Matrix sub(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      sub(i, j) = dense(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return dense_lambda_min(sub) >= -tol;
}

}  // namespace

SubspaceBasis::SubspaceBasis(Matrix columns) : columns_(std::move(columns)) {
  const Index n = columns_.rows();
  const Index k = columns_.cols();
  if (n < 1 || k < 1 || k > n)
    throw InvalidArgument("subspace basis must be n x k with 1 <= k <= n (got " + std::to_string(n) + " x " +
                          std::to_string(k) + ")");
  if (!columns_.allFinite()) throw InvalidArgument("subspace basis has non-finite entries");
  if (orthonormality_defect(columns_) > kOrthonormalityTolerance) columns_ = orthonormalize(columns_);
}

SubspaceBasis SubspaceBasis::coordinate(Index n, const std::vector<Index>& idx) {
  Matrix u = Matrix::Zero(n, static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] < 0 || idx[j] >= n) throw InvalidIndex("coordinate index out of range");
    u(idx[j], static_cast<Index>(j)) = 1.0;
  }
  return SubspaceBasis(std::move(u));
}

ConeFamily::ConeFamily(std::vector<SubspaceBasis> bases) : bases_(std::move(bases)) {
  if (bases_.empty()) throw InvalidArgument("cone family must contain at least one subspace");
  for (const auto& b : bases_) {
    if (b.ambient_dim() != bases_.front().ambient_dim() || b.rank() != bases_.front().rank())
      throw InvalidArgument("all subspaces in a family must share ambient dimension and rank");
  }
}

bool sparse_kpsd_member(const SymMat& x, Index k, double tol, std::uint64_t cap) {
  check_k(x.dim(), k);
  if (!(tol >= 0)) throw DomainError("tolerance must be nonnegative");
  require_enumerable(x.dim(), k, cap, "sparse k-PSD membership");
  const Matrix dense = x.dense();
  return for_each_combination(x.dim(), k, [&](const std::vector<Index>& idx) {
    return submatrix_psd(dense, idx, tol);
  });
}

bool sparse_kpsd_member(const SymMat& x, Index k) {
  return sparse_kpsd_member(x, k, default_psd_tolerance(x));
}

RefutationResult sparse_kpsd_refute(const SymMat& x, Index k, double tol, std::int64_t samples, Seed seed) {
  check_k(x.dim(), k);
  if (samples < 1) throw InvalidArgument("refutation needs at least one sample");
  const Matrix dense = x.dense();
  RefutationResult result;
  if (binomial(x.dim(), k) <= static_cast<std::uint64_t>(samples)) {
    result.certain = true;
    for_each_combination(x.dim(), k, [&](const std::vector<Index>& idx) {
      ++result.subsets_checked;
      if (!submatrix_psd(dense, idx, tol)) {
        result.member = false;
        result.violating_subset = idx;
        return false;
      }
      return true;
    });
    return result;
  }
  Rng rng(seed);
  for (std::int64_t s = 0; s < samples; ++s) {
    auto idx = random_subset(x.dim(), k, rng);
    ++result.subsets_checked;
    if (!submatrix_psd(dense, idx, tol)) {
      result.member = false;
      result.certain = true;
      result.violating_subset = std::move(idx);
      return result;
    }
  }
  return result;
}

bool general_kpsd_member(const SymMat& x, const ConeFamily& family, double tol) {
  if (family.ambient_dim() != x.dim())
    throw InvalidArgument("family ambient dimension " + std::to_string(family.ambient_dim()) +
                          " does not match matrix dimension " + std::to_string(x.dim()));
  if (!(tol >= 0)) throw DomainError("tolerance must be nonnegative");
  const Matrix dense = x.dense();
  return std::all_of(family.bases().begin(), family.bases().end(), [&](const SubspaceBasis& u) {
    return dense_lambda_min(u.compress(dense)) >= -tol;
  });
}

SymMat g_abn(double a, double b, Index n) {
  if (n < 2) throw InvalidArgument("G(a,b;n) requires n >= 2");
  const double nn = static_cast<double>(n);
  const double diag = a / nn + b * (1.0 - 1.0 / nn);
  const double off = a / nn - b / nn;
  return SymMat::generate(n, [&](Index i, Index j) { return i == j ? diag : off; });
}

WitnessCoefficients witness_coefficients(Index n, Index k) {
  if (k <= 1) throw InvalidArgument("witness construction requires k >= 2");
  if (k > n) throw InvalidArgument("witness construction requires k <= n");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return {(kk - nn) / (nn * (kk - 1.0)), kk / (nn * (kk - 1.0))};
}

SymMat witness_matrix(Index n, Index k) {
  const auto c = witness_coefficients(n, k);
  return g_abn(c.a, c.b, n);
}

double eps_star_lower_sparse(Index n, Index k) {
  if (k <= 1) throw InvalidArgument("eps* lower bound requires k >= 2");
  if (k > n) throw InvalidArgument("eps* lower bound requires k <= n");
  return static_cast<double>(n - k) / static_cast<double>(k - 1);
}

ConeFamily coordinate_family(Index n, Index k, std::uint64_t cap) {
  check_k(n, k);
  require_enumerable(n, k, cap, "coordinate family");
  std::vector<SubspaceBasis> bases;
  bases.reserve(static_cast<std::size_t>(binomial(n, k)));
  for_each_combination(n, k, [&](const std::vector<Index>& idx) {
    bases.push_back(SubspaceBasis::coordinate(n, idx));
    return true;
  });
  return ConeFamily(std::move(bases));
}

ConeFamily random_family(Index n, Index k, std::size_t count, Seed seed) {
  check_k(n, k);
  if (count == 0) throw InvalidArgument("family size must be >= 1");
  std::vector<SubspaceBasis> bases;
  bases.reserve(count);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    Matrix g(n, k);
    for (Index c = 0; c < k; ++c)
      for (Index r = 0; r < n; ++r) g(r, c) = normal(rng);
    bases.emplace_back(orthonormalize(g));
  }
  return ConeFamily(std::move(bases));
}

SymMat sample_factor_width_extreme(Index n, Index k, Seed seed) {
  check_k(n, k);
  Rng rng(seed);
  const auto support = random_subset(n, k, rng);
  std::normal_distribution<double> normal;
  DenseVector<double> v = DenseVector<double>::Zero(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Index i : support) v(i) = normal(rng);
    norm = v.norm();
  }
  v /= norm;
  return SymMat::generate(n, [&](Index i, Index j) { return v(i) * v(j); });
}

void write_conefam(std::ostream& os, const ConeFamily& family) {
  const Index n = family.ambient_dim();
  const Index k = family.rank();
  os << n << ' ' << k << ' ' << family.size() << '\n';
  std::ostringstream cell;
  cell << std::setprecision(17);
  for (const auto& b : family.bases()) {
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < k; ++c) {
        cell.str({});
        cell << b.columns()(r, c);
        os << (c ? " " : "") << cell.str();
      }
      os << '\n';
    }
  }
}

ConeFamily read_conefam(std::istream& is) {
  std::string first;
  if (!(is >> first)) throw ParseError("conefam: missing header");
  if (first == "conefam") {
    std::string version;
    is >> version;
    if (version != "v1") throw ParseError("conefam: unsupported version '" + version + "'");
    if (!(is >> first)) throw ParseError("conefam: missing header");
  }
  long long n = 0, k = 0, count = 0;
  try {
    n = std::stoll(first);
  } catch (const std::exception&) {
    throw ParseError("conefam: bad header");
  }
  if (!(is >> k >> count)) throw ParseError("conefam: header must be 'n k N'");
  if (n < 1 || k < 1 || k > n || count < 1) throw ParseError("conefam: invalid header values");
  std::vector<SubspaceBasis> bases;
  bases.reserve(static_cast<std::size_t>(count));
  for (long long b = 0; b < count; ++b) {
    Matrix u(n, k);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < k; ++c)
        if (!(is >> u(r, c)))
          throw ParseError("conefam: block " + std::to_string(b) + " is truncated");
    bases.emplace_back(std::move(u));
  }
  std::string extra;
  if (is >> extra) throw ParseError("conefam: trailing data '" + extra + "'");
  return ConeFamily(std::move(bases));
}

}  // namespace psdb::cones
