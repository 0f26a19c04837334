#include <sstream>

#include "doctest.h"
#include "psdb/cones.hpp"
#include "psdb/widths.hpp"

using namespace psdb;
using namespace psdb::cones;

namespace {

SymMat random_psd(Index n, std::uint64_t seed) {
  const auto g = sample_standard_gaussian_sym(n, Seed{seed}).dense();
  return SymMat::from_dense(g * g.transpose());
}

// G shifted so that its smallest k-sparse eigenvalue is exactly zero: on the
// boundary of the sparse cone and usually outside S^n_+.
SymMat boundary_sparse_member(Index n, Index k, std::uint64_t seed) {
  const auto g = sample_standard_gaussian_sym(n, Seed{seed});
  const double shift = widths::k_sparse_largest_eigenvalue(-g, k, widths::SparseMode::kExhaustive);
  return g + SymMat::identity(n) * shift;
}

}  // namespace

TEST_CASE("witness coefficients") {
  const auto [a, b] = witness_coefficients(6, 3);
  CHECK(a == doctest::Approx(-0.25));
  CHECK(b == doctest::Approx(0.25));
  const auto edge = witness_coefficients(5, 5);
  CHECK(edge.a == 0.0);
  CHECK(edge.b == doctest::Approx(0.25));
  CHECK(is_psd(witness_matrix(5, 5)));
  CHECK_THROWS_AS(witness_matrix(5, 1), InvalidArgument);
  CHECK_THROWS_AS(witness_matrix(5, 6), InvalidArgument);
}

TEST_CASE("witness matrix against sparse membership") {
  const auto w = witness_matrix(6, 3);
  CHECK(trace(w) == doctest::Approx(1.0));
  CHECK(sparse_kpsd_member(w, 3, 1e-9));
  CHECK_FALSE(sparse_kpsd_member(w, 4, 1e-9));
  // the leading 4x4 block directly: ka + (n-k)b with k=4 is -1 + 2*0.25 < 0 structure
  CHECK(lambda_min(principal_submatrix(w, IndexSet({0, 1, 2, 3}))) < -1e-3);
}

TEST_CASE("witness eps threshold n=10 k=2") {
  const auto w = witness_matrix(10, 2);
  CHECK(is_psd(w + SymMat::identity(10) * (8.0 / 10.0)));
  CHECK(is_psd(w + SymMat::identity(10) * (8.001 / 10.0)));
  CHECK_FALSE(is_psd(w + SymMat::identity(10) * (7.999 / 10.0)));
}

TEST_CASE("witness optimality for all small (n, k)") {
  for (Index n = 3; n <= 20; ++n) {
    for (Index k = 2; k < n; ++k) {
      const auto w = witness_matrix(n, k);
      const double eps = eps_star_lower_sparse(n, k);
      const auto id = SymMat::identity(n);
      CHECK(is_psd(w + id * ((eps + 1e-6) / static_cast<double>(n))));
      CHECK_FALSE(is_psd(w + id * ((eps - 1e-6) / static_cast<double>(n))));
    }
  }
}

TEST_CASE("eps_star_lower_sparse") {
  CHECK(eps_star_lower_sparse(10, 2) == 8.0);
  CHECK(eps_star_lower_sparse(7, 7) == 0.0);
  CHECK(eps_star_lower_sparse(100, 50) == doctest::Approx(50.0 / 49.0));
  CHECK(eps_star_lower_sparse(100, 50) == doctest::Approx(1.0204).epsilon(1e-4));
  CHECK_THROWS_AS(eps_star_lower_sparse(10, 1), InvalidArgument);
}

TEST_CASE("g_abn") {
  CHECK((g_abn(1, 1, 5) - SymMat::identity(5)).packed().cwiseAbs().maxCoeff() < 1e-15);
  const auto half = g_abn(1, 0, 2);
  CHECK(half(0, 0) == doctest::Approx(0.5));
  CHECK(half(0, 1) == doctest::Approx(0.5));
  const auto ones = g_abn(4, 0, 4);
  CHECK(ones.packed().minCoeff() == doctest::Approx(1.0));
  CHECK(ones.packed().maxCoeff() == doctest::Approx(1.0));
  CHECK(trace(g_abn(0.3, -0.7, 6)) == doctest::Approx(0.3 - 0.7 * 5));
  CHECK_THROWS(g_abn(1, 1, 1));
}

TEST_CASE("sparse membership basics") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = random_psd(6, s);
    for (Index k = 1; k <= 6; ++k) CHECK(sparse_kpsd_member(p, k));
  }
  CHECK_FALSE(sparse_kpsd_member(-SymMat::identity(4), 1));
  CHECK_THROWS_AS(sparse_kpsd_member(SymMat::identity(3), 4), InvalidArgument);
  CHECK_THROWS_AS(sparse_kpsd_member(SymMat::identity(40), 20, 1e-9), EnumerationLimit);
}

TEST_CASE("randomized refutation") {
  const auto w = witness_matrix(12, 3);
  // exhaustive when the sample budget covers every subset
  auto r = sparse_kpsd_refute(w, 4, 1e-9, 1000, Seed{1});
  CHECK(r.certain);
  CHECK_FALSE(r.member);
  CHECK(r.violating_subset.size() == 4);
  CHECK(lambda_min(principal_submatrix(w, IndexSet(r.violating_subset))) < 0);

  const auto big = witness_matrix(60, 3);
  // a violating subset is a proof, even when sampling
  r = sparse_kpsd_refute(big, 30, 1e-9, 50, Seed{2});
  CHECK(r.certain);
  CHECK_FALSE(r.member);
  r = sparse_kpsd_refute(big, 3, 1e-9, 50, Seed{2});
  CHECK(r.member);
  CHECK_FALSE(r.certain);
  CHECK(r.subsets_checked == 50);
}

TEST_CASE("nesting in k") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Index n = 6;
    const auto x = boundary_sparse_member(n, 1 + s % 5, s);
    for (Index k2 = 2; k2 <= n; ++k2)
      if (sparse_kpsd_member(x, k2)) CHECK(sparse_kpsd_member(x, k2 - 1));
  }
}

TEST_CASE("coordinate family") {
  CHECK(coordinate_family(3, 2).size() == 3);
  const auto singles = coordinate_family(4, 1);
  REQUIRE(singles.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(singles.bases()[i].columns().cwiseAbs().sum() == 1.0);
    CHECK(singles.bases()[i].columns()(static_cast<Index>(i), 0) == 1.0);
  }
  const auto full = coordinate_family(5, 5);
  REQUIRE(full.size() == 1);
  CHECK(full.bases()[0].columns() == Eigen::MatrixXd::Identity(5, 5));
  CHECK_THROWS_AS(coordinate_family(40, 20), EnumerationLimit);
}

TEST_CASE("general membership agrees with sparse on the coordinate family") {
  const auto family = coordinate_family(6, 3);
  int agree = 0;
  int members = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    // alternate between near-boundary and unstructured inputs
    const auto x = s % 2 ? boundary_sparse_member(6, 2 + s % 4, s) : sample_standard_gaussian_sym(6, Seed{s});
    const double tol = default_psd_tolerance(x);
    const bool sparse = sparse_kpsd_member(x, 3, tol);
    members += sparse;
    agree += sparse == general_kpsd_member(x, family, tol);
  }
  CHECK(agree == 100);
  CHECK(members > 10);
}

TEST_CASE("general membership edge cases") {
  const auto x = sample_standard_gaussian_sym(5, Seed{5});
  const ConeFamily full({SubspaceBasis(Eigen::MatrixXd::Identity(5, 5))});
  CHECK(general_kpsd_member(x, full, 1e-9) == is_psd(x, 1e-9));
  CHECK(general_kpsd_member(random_psd(5, 1), full, 1e-9));
  CHECK_FALSE(general_kpsd_member(-SymMat::identity(5), random_family(5, 2, 7, Seed{1}), 1e-9));
  CHECK_THROWS_AS(general_kpsd_member(SymMat::identity(4), full, 1e-9), InvalidArgument);
}

TEST_CASE("psd cone sits inside every k-psd cone") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto family = random_family(7, 1 + s % 7, 1 + s % 9, Seed{s});
    const auto p = random_psd(7, 1000 + s);
    CHECK(general_kpsd_member(p, family, default_psd_tolerance(p)));
  }
}

TEST_CASE("membership is scale invariant") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = boundary_sparse_member(6, 3, s) + SymMat::identity(6) * (s % 3 == 0 ? -1e-3 : 1e-3);
    const bool base = sparse_kpsd_member(x, 3, 1e-9);
    for (double t : {0.5, 2.0, 10.0}) CHECK(sparse_kpsd_member(x * t, 3, 1e-9 * t) == base);
  }
}

TEST_CASE("subspace basis validation and repair") {
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(4, 2);
  u(0, 0) = 1.0 + 1e-7;
  const SubspaceBasis repaired(u);
  CHECK(orthonormality_defect(repaired.columns()) < 1e-12);
  CHECK(orthonormality_defect(u) > 1e-8);
  Eigen::MatrixXd deficient(3, 2);
  deficient << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS(SubspaceBasis(deficient));
  CHECK_THROWS(ConeFamily(std::vector<SubspaceBasis>{}));
  CHECK_THROWS(ConeFamily({SubspaceBasis::coordinate(4, {0, 1}), SubspaceBasis::coordinate(4, {0})}));
}

TEST_CASE("random family is orthonormal and seeded") {
  const auto a = random_family(16, 4, 50, Seed{3});
  const auto b = random_family(16, 4, 50, Seed{3});
  CHECK(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(orthonormality_defect(a.bases()[i].columns()) <= 1e-10);
    CHECK(a.bases()[i].columns() == b.bases()[i].columns());
  }
}

TEST_CASE("factor width extremes") {
  const auto full = sample_factor_width_extreme(5, 5, Seed{1});
  CHECK(trace(full) == doctest::Approx(1.0));
  const auto ev = eigenvalues_descending(full);
  CHECK(ev(0) == doctest::Approx(1.0));
  CHECK(std::abs(ev(1)) < 1e-12);

  const auto single = sample_factor_width_extreme(6, 1, Seed{2});
  CHECK(single.packed().cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK(single.packed().maxCoeff() == doctest::Approx(1.0));

  // duality with the sparse cone: <vv^T, Y> >= 0 for Y in the sparse k-PSD cone
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index n = 7, k = 1 + static_cast<Index>(s % 6);
    const auto x = sample_factor_width_extreme(n, k, Seed{s});
    Eigen::Index support = 0;
    for (Index i = 0; i < n; ++i) support += x(i, i) != 0.0;
    CHECK(support <= k);
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto y = boundary_sparse_member(n, k, 7919 * s + t);
      const double tol = default_psd_tolerance(y);
      REQUIRE(sparse_kpsd_member(y, k, tol));
      CHECK(inner(x, y) >= -tol);
    }
  }
}

TEST_CASE("conefam round trip") {
  const auto family = random_family(5, 2, 3, Seed{11});
  std::stringstream ss;
  write_conefam(ss, family);
  const auto back = read_conefam(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.bases()[i].columns() == family.bases()[i].columns());

  std::stringstream tagged("conefam v1\n3 1 1\n0\n1\n0\n");
  CHECK(read_conefam(tagged).bases()[0].columns()(1, 0) == 1.0);
  std::stringstream bad("3 1 2\n0 1 0\n");
  CHECK_THROWS_AS(read_conefam(bad), ParseError);
}
