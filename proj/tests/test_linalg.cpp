#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "tsvdtd/linalg.hpp"
#include "tsvdtd/rng.hpp"

using namespace tsvdtd;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = scale * rng.normal();
    }
  }
  return m;
}

Matrix random_rank_k(int rows, int cols, int k, std::uint64_t seed) {
  return random_matrix(rows, k, seed) * random_matrix(k, cols, seed ^ 0xabcdef);
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace

TEST_CASE("truncated_svd: identity matrix keeps both singular values") {
  const Matrix eye = Matrix::Identity(2, 2);
  const TruncatedSvd svd = truncated_svd(eye, 2);
  CHECK(svd.singular_values(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(svd.singular_values(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((svd.reconstruct() - eye).norm() <= 1e-10);
}

TEST_CASE("truncated_svd: zero matrix has zero spectrum and orthonormal factors") {
  const Matrix zero = Matrix::Zero(3, 2);
  const TruncatedSvd svd = truncated_svd(zero, 1);
  CHECK(svd.singular_values(0) == 0.0);
  CHECK(svd.reconstruct().norm() == 0.0);
  CHECK((svd.left_factors.transpose() * svd.left_factors - Matrix::Identity(1, 1)).norm() <=
        1e-10);
  CHECK((svd.right_factors.transpose() * svd.right_factors - Matrix::Identity(1, 1)).norm() <=
        1e-10);
}

TEST_CASE("truncated_svd: rank-1 outer product") {
  Vector u(3);
  u << 1, 2, 3;
  Vector v(2);
  v << 1, 2;
  const Matrix m = u * v.transpose();
  const TruncatedSvd svd = truncated_svd(m, 1);

  // sigma_1 = ||u|| ||v|| for a rank-1 outer product; cross-checked against
  // the Jacobi oracle spectrum.
  CHECK(svd.singular_values(0) == doctest::Approx(std::sqrt(70.0)).epsilon(1e-12));
  const Vector sigma = oracle::singular_values(m);
  CHECK(svd.singular_values(0) == doctest::Approx(sigma(0)).epsilon(1e-12));
  CHECK((svd.reconstruct() - m).norm() <= 1e-10 * m.norm());
}

TEST_CASE("truncated_svd: invariants on seeded random matrices") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    const int n = 2 + static_cast<int>((seed * 5) % 6);
    const int k = 1 + static_cast<int>(seed % std::min(d, n));
    const Matrix m = random_matrix(d, n, 1000 + seed);
    const TruncatedSvd svd = truncated_svd(m, k);

    CHECK((svd.left_factors.transpose() * svd.left_factors - Matrix::Identity(k, k)).norm() <=
          1e-10);
    CHECK((svd.right_factors.transpose() * svd.right_factors - Matrix::Identity(k, k)).norm() <=
          1e-10);
    for (int i = 0; i + 1 < k; ++i) {
      CHECK(svd.singular_values(i) >= svd.singular_values(i + 1));
    }
    CHECK(svd.singular_values(k - 1) >= 0.0);

    // Sign canonicalization: largest-magnitude entry of each right factor
    // column is nonnegative.
    for (int i = 0; i < k; ++i) {
      int arg = 0;
      svd.right_factors.col(i).cwiseAbs().maxCoeff(&arg);
      CHECK(svd.right_factors(arg, i) >= 0.0);
    }

    CHECK((svd.reconstruct() - oracle::rank_k_approx(m, k)).norm() <= 1e-10 * (1.0 + m.norm()));
  }
}

TEST_CASE("truncated_svd: projector identities") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = random_matrix(8, 6, 2000 + seed);
    const int k = 1 + static_cast<int>(seed % 6);
    const TruncatedSvd svd = truncated_svd(m, k);

    const Matrix via_right = m * svd.right_factors * svd.right_factors.transpose();
    const Matrix via_left = svd.left_factors * svd.left_factors.transpose() * m;
    const Matrix via_factors = svd.reconstruct();
    CHECK((via_right - via_left).norm() <= 1e-9);
    CHECK((via_right - via_factors).norm() <= 1e-9);
    CHECK((via_left - via_factors).norm() <= 1e-9);
  }
}

TEST_CASE("truncated_svd: input validation") {
  const Matrix m = Matrix::Ones(3, 2);
  CHECK_THROWS_AS(truncated_svd(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(truncated_svd(m, 3), std::invalid_argument);
  Matrix bad = m;
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(truncated_svd(bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(project_rank_k(bad, 1), std::invalid_argument);
}

TEST_CASE("truncated_svd: determinism is bitwise") {
  const Matrix m = random_matrix(7, 5, 77);
  const TruncatedSvd a = truncated_svd(m, 3);
  const TruncatedSvd b = truncated_svd(m, 3);
  CHECK(bitwise_equal(a.left_factors, b.left_factors));
  CHECK(bitwise_equal(a.right_factors, b.right_factors));
  CHECK(std::memcmp(a.singular_values.data(), b.singular_values.data(),
                    sizeof(double) * a.singular_values.size()) == 0);
}

TEST_CASE("project_rank_k: in-span input is returned unchanged") {
  const Matrix m = random_rank_k(6, 4, 2, 31);
  CHECK((project_rank_k(m, 2) - m).norm() <= 1e-10 * m.norm());
  CHECK((project_rank_k(m, 3) - m).norm() <= 1e-10 * m.norm());
}

TEST_CASE("project_rank_k: diagonal truncation") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 3.0;
  CHECK((project_rank_k(m, 1) - expected).norm() <= 1e-12);
}

TEST_CASE("project_rank_k: matches the full-SVD oracle") {
  const Matrix m = random_matrix(4, 3, 4242);
  CHECK((project_rank_k(m, 2) - oracle::rank_k_approx(m, 2)).norm() <= 1e-10);
}

TEST_CASE("project_rank_k: idempotent, k == cols is bit-identity") {
  const Matrix m = random_matrix(6, 4, 99);
  const Matrix once = project_rank_k(m, 2);
  const Matrix twice = project_rank_k(once, 2);
  CHECK((twice - once).norm() <= 1e-10 * (1.0 + once.norm()));
  CHECK(bitwise_equal(project_rank_k(m, 4), m));
}

TEST_CASE("project_rank_k: Eckart-Young optimality against random competitors") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    const int n = 2 + static_cast<int>((seed * 3) % 7);
    const int k = 1 + static_cast<int>(seed % n);
    const Matrix m = random_matrix(d, n, 3000 + seed);
    const double best = (m - project_rank_k(m, k)).norm();
    for (int c = 0; c < 30; ++c) {
      const Matrix competitor =
          random_rank_k(d, n, k, derive_stream(seed, 0x7777, static_cast<std::uint64_t>(c)));
      CHECK(best <= (m - competitor).norm() + 1e-9);
    }
  }
}

TEST_CASE("project_rank_k: non-expansive and monotone in k") {
  const Matrix m = random_matrix(8, 6, 555);
  double previous_error = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 6; ++k) {
    const Matrix projected = project_rank_k(m, k);
    CHECK(projected.norm() <= m.norm() * (1.0 + 1e-12));
    const double error = (m - projected).norm();
    CHECK(error <= previous_error + 1e-12);
    previous_error = error;
  }
}

TEST_CASE("row_space_complement: axis-aligned case") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const SubspaceComplement c = row_space_complement(m, 1);
  CHECK(c.basis.rows() == 2);
  CHECK(c.basis.cols() == 1);
  CHECK(std::abs(c.basis(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(c.basis(0, 0)) <= 1e-12);
  CHECK(c.basis(1, 0) >= 0.0);  // canonical sign
}

TEST_CASE("row_space_complement: annihilates a low-rank matrix") {
  const Matrix m = random_rank_k(5, 4, 2, 808);
  const SubspaceComplement c = row_space_complement(m, 2);
  CHECK((c.basis.transpose() * c.basis - Matrix::Identity(2, 2)).norm() <= 1e-10);
  CHECK((m * c.basis).norm() <= 1e-8 * m.norm());

  // Cross-check against the Jacobi-oracle null space: the two bases span the
  // same subspace, so projecting one onto the other loses nothing.
  const Matrix oracle_basis = oracle::rowspace_complement(m, 2);
  const Matrix projected = oracle_basis * (oracle_basis.transpose() * c.basis);
  CHECK((projected - c.basis).norm() <= 1e-8);
}

TEST_CASE("row_space_complement: rejects r >= cols and rank deficiency") {
  const Matrix m = random_matrix(4, 3, 9);
  CHECK_THROWS_AS(row_space_complement(m, 3), std::invalid_argument);
  CHECK_THROWS_AS(row_space_complement(m, 4), std::invalid_argument);
  const Matrix low = random_rank_k(4, 3, 1, 10);
  CHECK_THROWS_AS(row_space_complement(low, 2), std::invalid_argument);
}

TEST_CASE("misalignment: in-span mass is zero, unit case is one") {
  const Matrix m = random_rank_k(6, 5, 2, 11);
  const SubspaceComplement c = row_space_complement(m, 2);

  // Rows built from the top right singular vectors carry no complement mass.
  const TruncatedSvd svd = truncated_svd(m, 2);
  const Matrix in_span = random_matrix(6, 2, 12) * svd.right_factors.transpose();
  CHECK(misalignment(in_span, c) <= 1e-16 * in_span.squaredNorm());

  // Zero-width complement (r == N) always reports zero.
  const SubspaceComplement full = SubspaceComplement::zero_width(5, 5);
  CHECK(misalignment(in_span, full) == 0.0);

  // V = e1 e2^T against complement basis e2.
  Matrix v = Matrix::Zero(2, 2);
  v(0, 1) = 1.0;
  SubspaceComplement e2;
  e2.rank = 1;
  e2.basis = Matrix::Zero(2, 1);
  e2.basis(1, 0) = 1.0;
  CHECK(misalignment(v, e2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("misalignment: both projector forms agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix ref = random_rank_k(7, 5, 3, 500 + seed);
    const SubspaceComplement c = row_space_complement(ref, 3);
    const Matrix v = random_matrix(7, 5, 600 + seed);
    const double direct = misalignment(v, c);
    const double via_projector = (v * c.basis * c.basis.transpose()).squaredNorm();
    CHECK(std::abs(direct - via_projector) <= 1e-10 * (1.0 + direct));
  }
}

TEST_CASE("frobenius_mse: reference values") {
  const Matrix a = random_matrix(5, 4, 21);
  CHECK(frobenius_mse(a, a) == 0.0);

  const Matrix ones = Matrix::Ones(3, 7);
  CHECK(frobenius_mse(ones, Matrix::Zero(3, 7)) == doctest::Approx(1.0).epsilon(1e-15));

  Matrix b(2, 2);
  b << 1, 2, 3, 4;
  CHECK(frobenius_mse(b, Matrix::Zero(2, 2)) == doctest::Approx(7.5).epsilon(1e-15));

  CHECK_THROWS_AS(frobenius_mse(a, ones), std::invalid_argument);
}
