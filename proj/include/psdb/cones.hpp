#pragma once

// Membership oracles for the PSD cone and its k-PSD outer approximations,
// and the two-eigenvalue witness family G(a, b; n).

#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "psdb/combinatorics.hpp"
#include "psdb/linalg.hpp"

namespace psdb::cones {

using Matrix = DenseMatrix<double>;

// n x k matrix with orthonormal columns spanning one subspace V_i.
class SubspaceBasis {
 public:
  static constexpr double kOrthonormalityTolerance = 1e-10;

  // Columns drifting from orthonormality by more than 1e-10 (max-norm of
  // U^T U - I) are re-orthonormalized with a thin QR. Rank-deficient input is
  // rejected.
  explicit SubspaceBasis(Matrix columns);

  Index ambient_dim() const noexcept { return columns_.rows(); }
  Index rank() const noexcept { return columns_.cols(); }
  const Matrix& columns() const noexcept { return columns_; }

  // Coordinate subspace spanned by e_i, i in idx.
  static SubspaceBasis coordinate(Index n, const std::vector<Index>& idx);

  // U^T X U.
  Matrix compress(const Matrix& x) const { return columns_.transpose() * x * columns_; }

 private:
  Matrix columns_;
};

double orthonormality_defect(const Matrix& u);

class ConeFamily {
 public:
  explicit ConeFamily(std::vector<SubspaceBasis> bases);

  Index ambient_dim() const noexcept { return bases_.front().ambient_dim(); }
  Index rank() const noexcept { return bases_.front().rank(); }
  std::size_t size() const noexcept { return bases_.size(); }
  const std::vector<SubspaceBasis>& bases() const noexcept { return bases_; }

 private:
  std::vector<SubspaceBasis> bases_;
};

// Every k x k principal submatrix is PSD at tol. Throws EnumerationLimit when
// C(n, k) exceeds the cap.
bool sparse_kpsd_member(const SymMat& x, Index k, double tol,
                        std::uint64_t cap = kDefaultEnumerationCap);
bool sparse_kpsd_member(const SymMat& x, Index k);

struct RefutationResult {
  bool member = true;       // false is certain, true only probabilistic
  bool certain = false;     // true iff the verdict is exact
  std::int64_t subsets_checked = 0;
  std::vector<Index> violating_subset;  // set when member == false
};

// Samples random k-subsets; exhaustive (and certain) when C(n, k) <= samples.
RefutationResult sparse_kpsd_refute(const SymMat& x, Index k, double tol, std::int64_t samples,
                                    Seed seed);

bool general_kpsd_member(const SymMat& x, const ConeFamily& family, double tol);

// a * 11^T/n + b * (I - 11^T/n)
SymMat g_abn(double a, double b, Index n);

struct WitnessCoefficients {
  double a;
  double b;
};
WitnessCoefficients witness_coefficients(Index n, Index k);

// Unit-trace matrix in the sparse k-PSD cone that is farthest from S^n_+
// along the segment between 11^T/n and I/n.
SymMat witness_matrix(Index n, Index k);

// (n - k) / (k - 1)
double eps_star_lower_sparse(Index n, Index k);

ConeFamily coordinate_family(Index n, Index k, std::uint64_t cap = kDefaultEnumerationCap);

// N bases, each the thin-QR orthonormalization of an n x k Gaussian matrix.
ConeFamily random_family(Index n, Index k, std::size_t count, Seed seed);

// v v^T with v uniform on the unit sphere of a uniformly random k-sparse support.
SymMat sample_factor_width_extreme(Index n, Index k, Seed seed);

// "conefam v1": header "n k N", then N blocks of n x k values, row-major.
void write_conefam(std::ostream& os, const ConeFamily& family);
ConeFamily read_conefam(std::istream& is);

}  // namespace psdb::cones
