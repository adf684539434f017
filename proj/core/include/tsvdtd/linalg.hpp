#pragma once

#include "tsvdtd/types.hpp"

namespace tsvdtd {

/// Rank-k factors of a d x N matrix.
///
/// left_factors is d x k with orthonormal columns, singular_values is
/// nonincreasing and nonnegative, right_factors is N x k with orthonormal
/// columns. Factor signs are canonicalized: in each right factor column the
/// entry of largest magnitude is nonnegative (lowest index wins ties), and
/// the paired left column is flipped with it.
struct TruncatedSvd {
  Matrix left_factors;
  Vector singular_values;
  Matrix right_factors;

  /// left_factors * diag(singular_values) * right_factors^T.
  Matrix reconstruct() const;
};

/// Orthonormal basis of the orthogonal complement of the top-r right
/// singular subspace of a reference matrix. basis is N x (N - r); rank == N
/// is represented as a zero-width basis.
struct SubspaceComplement {
  Matrix basis;
  int rank = 0;

  static SubspaceComplement zero_width(int tasks, int rank);
};

/// Top-k singular triples of m, computed through the N x N Gram matrix
/// m^T m and a dense symmetric eigensolve. Right factors come straight from
/// the eigenvectors; left factors are recovered as m h / sigma and columns
/// belonging to (numerically) zero singular values are completed with
/// orthonormalized canonical basis vectors.
///
/// Requires 1 <= k <= min(rows, cols) and finite entries.
TruncatedSvd truncated_svd(const Matrix& m, int k);

/// Best rank-k approximation of m in Frobenius norm, formed from the right:
/// m H^k (H^k)^T. k == cols returns m unchanged (bit-identical), so full-rank
/// truncation is exactly the identity. Requires 1 <= k <= cols.
Matrix project_rank_k(const Matrix& m, int k);

/// Orthonormal basis of the orthogonal complement of the top-r right
/// singular subspace of m. Requires 1 <= r < cols and effective rank >= r
/// (sigma_r > 1e-10 * sigma_1). Callers wanting r == cols must special-case
/// to SubspaceComplement::zero_width.
SubspaceComplement row_space_complement(const Matrix& m, int r);

/// Squared Frobenius mass of v outside the reference row space:
/// ||v B B^T||_F^2, computed as ||v B||_F^2 (the projector is an isometry on
/// its range). Zero-width complements give 0.
double misalignment(const Matrix& v, const SubspaceComplement& complement);

/// ||a - b||_F^2 / (rows * cols).
double frobenius_mse(const Matrix& a, const Matrix& b);

}  // namespace tsvdtd
