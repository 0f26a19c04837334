#pragma once

// Dense real symmetric matrices with packed upper-triangular storage, plus
// the handful of spectral primitives the cone and width code is built on.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psdb/error.hpp"
#include "psdb/rng.hpp"

namespace psdb {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Element of S^n. Only the upper triangle is stored, row by row:
// (0,0) (0,1) ... (0,n-1) (1,1) ... (n-1,n-1).
template <typename Scalar>
class SymmetricMatrix {
 public:
  using Packed = DenseVector<Scalar>;
  using Dense = DenseMatrix<Scalar>;

  explicit SymmetricMatrix(Index n) : n_(checked_dim(n)), packed_(Packed::Zero(packed_size(n))) {}

  SymmetricMatrix(Index n, Packed packed) : n_(checked_dim(n)), packed_(std::move(packed)) {
    if (packed_.size() != packed_size(n_)) {
      throw InvalidDimension("packed storage of length " + std::to_string(packed_.size()) +
                             " does not match dimension " + std::to_string(n_));
    }
  }

  static constexpr Index packed_size(Index n) { return n * (n + 1) / 2; }

  static SymmetricMatrix zero(Index n) { return SymmetricMatrix(n); }

  static SymmetricMatrix identity(Index n) {
    SymmetricMatrix m(n);
    for (Index i = 0; i < n; ++i) m.packed_[m.offset(i, i)] = Scalar(1);
    return m;
  }

  static SymmetricMatrix diagonal(const std::vector<Scalar>& d) {
    SymmetricMatrix m(static_cast<Index>(d.size()));
    for (Index i = 0; i < m.n_; ++i) m.packed_[m.offset(i, i)] = d[static_cast<std::size_t>(i)];
    return m;
  }

  // Reads the upper triangle of a square matrix; the lower one is ignored.
  template <typename Derived>
  static SymmetricMatrix from_upper(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) throw InvalidDimension("matrix is not square");
    SymmetricMatrix m(a.rows());
    for (Index i = 0; i < m.n_; ++i)
      for (Index j = i; j < m.n_; ++j) m.packed_[m.offset(i, j)] = a(i, j);
    return m;
  }

  // Symmetrizes (A + A^T) / 2.
  template <typename Derived>
  static SymmetricMatrix from_dense(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) throw InvalidDimension("matrix is not square");
    SymmetricMatrix m(a.rows());
    for (Index i = 0; i < m.n_; ++i)
      for (Index j = i; j < m.n_; ++j)
        m.packed_[m.offset(i, j)] = i == j ? Scalar(a(i, i)) : Scalar((a(i, j) + a(j, i)) / 2);
    return m;
  }

  template <typename F>
  static SymmetricMatrix generate(Index n, F&& entry) {
    SymmetricMatrix m(n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) m.packed_[m.offset(i, j)] = entry(i, j);
    return m;
  }

  Index dim() const noexcept { return n_; }
  const Packed& packed() const noexcept { return packed_; }

  Scalar operator()(Index i, Index j) const {
    if (i > j) std::swap(i, j);
    return packed_[offset(i, j)];
  }

  Dense dense() const {
    Dense a(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = i; j < n_; ++j) a(i, j) = a(j, i) = packed_[offset(i, j)];
    return a;
  }

  SymmetricMatrix& operator+=(const SymmetricMatrix& o) {
    require_same_dim(o);
    packed_ += o.packed_;
    return *this;
  }
  SymmetricMatrix& operator-=(const SymmetricMatrix& o) {
    require_same_dim(o);
    packed_ -= o.packed_;
    return *this;
  }
  SymmetricMatrix& operator*=(Scalar s) {
    packed_ *= s;
    return *this;
  }

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(Scalar s, SymmetricMatrix a) { return a *= s; }
  friend SymmetricMatrix operator*(SymmetricMatrix a, Scalar s) { return a *= s; }
  friend SymmetricMatrix operator-(SymmetricMatrix a) { return a *= Scalar(-1); }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.n_ == b.n_ && a.packed_ == b.packed_;
  }

 private:
  static Index checked_dim(Index n) {
    if (n < 1) throw InvalidDimension("dimension must be >= 1, got " + std::to_string(n));
    return n;
  }

  Index offset(Index i, Index j) const noexcept { return i * n_ - i * (i - 1) / 2 + (j - i); }

  void require_same_dim(const SymmetricMatrix& o) const {
    if (o.n_ != n_) throw InvalidDimension("dimension mismatch");
  }

  Index n_;
  Packed packed_;
};

using SymMat = SymmetricMatrix<double>;

template <typename Scalar>
Scalar trace(const SymmetricMatrix<Scalar>& m) {
  Scalar t(0);
  for (Index i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

// Trace inner product <A, B> = Tr(AB).
template <typename Scalar>
Scalar inner(const SymmetricMatrix<Scalar>& a, const SymmetricMatrix<Scalar>& b) {
  if (a.dim() != b.dim()) throw InvalidDimension("dimension mismatch");
  Scalar s(0);
  for (Index i = 0; i < a.dim(); ++i)
    for (Index j = i; j < a.dim(); ++j) s += (i == j ? Scalar(1) : Scalar(2)) * a(i, j) * b(i, j);
  return s;
}

template <typename Scalar>
Scalar frobenius_norm(const SymmetricMatrix<Scalar>& m) {
  using std::sqrt;
  return sqrt(inner(m, m));
}

// Hex FNV-1a digest of the packed entries; used in error messages.
template <typename Scalar>
std::string fingerprint(const SymmetricMatrix<Scalar>& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.packed().data());
  const std::size_t len = static_cast<std::size_t>(m.packed().size()) * sizeof(Scalar);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << "n=" << m.dim() << ":" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// Strictly increasing subset of [0, n).
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<Index> indices) : indices_(std::move(indices)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] < 0) throw InvalidIndex("negative index");
      if (i > 0 && indices_[i] <= indices_[i - 1])
        throw InvalidIndex("indices must be strictly increasing");
    }
  }

  static IndexSet all(Index n) {
    std::vector<Index> v(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return IndexSet(std::move(v));
  }

  Index size() const noexcept { return static_cast<Index>(indices_.size()); }
  Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& indices() const noexcept { return indices_; }

  void validate_against(Index n) const {
    if (!indices_.empty() && indices_.back() >= n)
      throw InvalidIndex("index " + std::to_string(indices_.back()) + " out of range for dimension " +
                         std::to_string(n));
  }

 private:
  std::vector<Index> indices_;
};

template <typename Scalar>
SymmetricMatrix<Scalar> principal_submatrix(const SymmetricMatrix<Scalar>& m, const IndexSet& idx) {
  idx.validate_against(m.dim());
  if (idx.size() == 0) throw InvalidIndex("empty index set");
  return SymmetricMatrix<Scalar>::generate(idx.size(),
                                           [&](Index i, Index j) { return m(idx[i], idx[j]); });
}

// Diagonal ~ N(0,1), strict upper triangle ~ N(0,1/2), all independent.
template <typename Scalar = double, typename Urbg>
SymmetricMatrix<Scalar> sample_standard_gaussian_sym(Index n, Urbg& rng) {
  if (n < 1) throw InvalidDimension("dimension must be >= 1, got " + std::to_string(n));
  std::normal_distribution<double> normal;
  const double off_scale = std::sqrt(0.5);
  return SymmetricMatrix<Scalar>::generate(n, [&](Index i, Index j) {
    const double z = normal(rng);
    return Scalar(i == j ? z : off_scale * z);
  });
}

template <typename Scalar = double>
SymmetricMatrix<Scalar> sample_standard_gaussian_sym(Index n, Seed seed) {
  Rng rng(seed);
  return sample_standard_gaussian_sym<Scalar>(n, rng);
}

// Eigenvalues of a dense self-adjoint matrix in nonincreasing order.
template <typename Derived>
DenseVector<typename Derived::Scalar> dense_eigenvalues_descending(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge");
  return solver.eigenvalues().reverse();
}

template <typename Scalar>
DenseVector<Scalar> eigenvalues_descending(const SymmetricMatrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(m.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigensolver did not converge for matrix " + fingerprint(m));
  return solver.eigenvalues().reverse();
}

template <typename Derived>
typename Derived::Scalar dense_lambda_max(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 1) return a(0, 0);
  return dense_eigenvalues_descending(a)(0);
}

template <typename Derived>
typename Derived::Scalar dense_lambda_min(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 1) return a(0, 0);
  const auto ev = dense_eigenvalues_descending(a);
  return ev(ev.size() - 1);
}

template <typename Scalar>
Scalar lambda_max(const SymmetricMatrix<Scalar>& m) {
  return eigenvalues_descending(m)(0);
}

template <typename Scalar>
Scalar lambda_min(const SymmetricMatrix<Scalar>& m) {
  const auto ev = eigenvalues_descending(m);
  return ev(ev.size() - 1);
}

// 1e-9 * max(1, ||M||_F)
template <typename Scalar>
Scalar default_psd_tolerance(const SymmetricMatrix<Scalar>& m) {
  using std::max;
  return Scalar(1e-9) * max(Scalar(1), frobenius_norm(m));
}

// lambda_min(M) >= -tol; a tie at exactly -tol counts as PSD.
template <typename Scalar>
bool is_psd(const SymmetricMatrix<Scalar>& m, Scalar tol) {
  if (!(tol >= Scalar(0))) throw DomainError("PSD tolerance must be nonnegative");
  return lambda_min(m) >= -tol;
}

template <typename Scalar>
bool is_psd(const SymmetricMatrix<Scalar>& m) {
  return is_psd(m, default_psd_tolerance(m));
}

// M - (Tr M / n) I
template <typename Scalar>
SymmetricMatrix<Scalar> project_traceless(const SymmetricMatrix<Scalar>& m) {
  const Scalar shift = trace(m) / Scalar(m.dim());
  return SymmetricMatrix<Scalar>::generate(
      m.dim(), [&](Index i, Index j) { return i == j ? m(i, i) - shift : m(i, j); });
}

// "symmat v1": first line n, then the packed entries, 17 significant digits.
template <typename Scalar>
void write_symmat(std::ostream& os, const SymmetricMatrix<Scalar>& m) {
  os << m.dim() << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  const auto& p = m.packed();
  Index pos = 0;
  for (Index i = 0; i < m.dim(); ++i) {
    for (Index j = i; j < m.dim(); ++j, ++pos) {
      if (j > i) os << ' ';
      line.str({});
      line << static_cast<double>(p[pos]);
      os << line.str();
    }
    os << '\n';
  }
}

template <typename Scalar = double>
SymmetricMatrix<Scalar> read_symmat(std::istream& is) {
  std::string first;
  if (!(is >> first)) throw ParseError("symmat: missing dimension");
  if (first == "symmat") {
    std::string version;
    is >> version;
    if (version != "v1") throw ParseError("symmat: unsupported version '" + version + "'");
    if (!(is >> first)) throw ParseError("symmat: missing dimension");
  }
  long long n = 0;
  try {
    std::size_t used = 0;
    n = std::stoll(first, &used);
    if (used != first.size()) throw std::invalid_argument(first);
  } catch (const std::exception&) {
    throw ParseError("symmat: bad dimension '" + first + "'");
  }
  if (n < 1) throw InvalidDimension("symmat: dimension must be >= 1");
  typename SymmetricMatrix<Scalar>::Packed p(SymmetricMatrix<Scalar>::packed_size(n));
  for (Index i = 0; i < p.size(); ++i) {
    std::string tok;
    if (!(is >> tok)) throw ParseError("symmat: expected " + std::to_string(p.size()) + " entries");
    try {
      p[i] = Scalar(std::stod(tok));
    } catch (const std::exception&) {
      throw ParseError("symmat: bad entry '" + tok + "'");
    }
  }
  std::string extra;
  if (is >> extra) throw ParseError("symmat: trailing data '" + extra + "'");
  return SymmetricMatrix<Scalar>(n, std::move(p));
}

}  // namespace psdb
