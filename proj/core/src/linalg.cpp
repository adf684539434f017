#include "tsvdtd/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tsvdtd {

namespace {

void require_finite(const Matrix& m, const char* op) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(op) + ": matrix contains non-finite entries");
  }
}

struct GramEigen {
  Vector values;   // eigenvalues of m^T m, descending, clamped to >= 0
  Matrix vectors;  // matching eigenvectors as columns
};

// Dense symmetric eigensolve of the N x N Gram matrix, reordered so the
// dominant directions come first.
GramEigen gram_eigen(const Matrix& m) {
  const Eigen::Index n = m.cols();
  Matrix gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gram eigensolve failed to converge");
  }
  GramEigen out;
  out.values = Vector(n);
  out.vectors = Matrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;  // solver returns ascending order
    out.values(i) = std::max(solver.eigenvalues()(src), 0.0);
    out.vectors.col(i) = solver.eigenvectors().col(src);
  }
  return out;
}

// Largest-magnitude entry nonnegative, lowest index breaking ties.
void canonicalize_column_sign(Matrix& m, Eigen::Index col) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mag = std::abs(m(i, col));
    if (mag > best) {
      best = mag;
      arg = i;
    }
  }
  if (m(arg, col) < 0.0) {
    m.col(col) = -m.col(col);
  }
}

// Fills column `col` of u with a unit vector orthogonal to columns [0, col),
// built from the canonical basis vector least represented so far.
void complete_orthonormal_column(Matrix& u, Eigen::Index col) {
  const Eigen::Index d = u.rows();
  Eigen::Index pick = 0;
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double represented = u.block(j, 0, 1, col).squaredNorm();
    if (represented < smallest) {
      smallest = represented;
      pick = j;
    }
  }
  Vector v = Vector::Zero(d);
  v(pick) = 1.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < col; ++j) {
      v -= u.col(j).dot(v) * u.col(j);
    }
  }
  const double norm = v.norm();
  if (norm <= 0.0) {
    throw std::runtime_error("orthonormal completion failed");
  }
  u.col(col) = v / norm;
}

}  // namespace

Matrix TruncatedSvd::reconstruct() const {
  return left_factors * singular_values.asDiagonal() * right_factors.transpose();
}

SubspaceComplement SubspaceComplement::zero_width(int tasks, int rank) {
  SubspaceComplement c;
  c.basis = Matrix(tasks, 0);
  c.rank = rank;
  return c;
}

TruncatedSvd truncated_svd(const Matrix& m, int k) {
  const Eigen::Index d = m.rows();
  const Eigen::Index n = m.cols();
  if (k < 1 || k > n) {
    throw std::invalid_argument("truncated_svd: k must satisfy 1 <= k <= cols, got k=" +
                                std::to_string(k) + " with cols=" + std::to_string(n));
  }
  if (k > d) {
    throw std::invalid_argument(
        "truncated_svd: k exceeds rows, left factors cannot have orthonormal columns");
  }
  require_finite(m, "truncated_svd");

  GramEigen eig = gram_eigen(m);

  TruncatedSvd out;
  out.right_factors = eig.vectors.leftCols(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    canonicalize_column_sign(out.right_factors, i);
  }
  out.singular_values = eig.values.head(k).cwiseSqrt();

  const double sigma_max = out.singular_values(0);
  const double zero_tol = sigma_max * static_cast<double>(std::max(d, n)) *
                          std::numeric_limits<double>::epsilon();

  // Recover left factors as m h / sigma. The Gram route floors tiny singular
  // values near sqrt(eps) * sigma_1, so a column whose image collapses under
  // reorthogonalization is treated as numerically zero: its direction is
  // completed orthonormally and its singular value is refined to ||m h||,
  // which is accurate at that scale.
  out.left_factors = Matrix(d, k);
  Matrix image = m * out.right_factors;  // d x k
  for (Eigen::Index i = 0; i < k; ++i) {
    bool recovered = false;
    if (out.singular_values(i) > zero_tol) {
      Vector col = image.col(i) / out.singular_values(i);
      for (Eigen::Index j = 0; j < i; ++j) {
        col -= out.left_factors.col(j).dot(col) * out.left_factors.col(j);
      }
      const double norm = col.norm();
      if (norm > 0.5) {
        out.left_factors.col(i) = col / norm;
        recovered = true;
      }
    }
    if (!recovered) {
      complete_orthonormal_column(out.left_factors, i);
      double refined = image.col(i).norm();
      if (i > 0) {
        refined = std::min(refined, out.singular_values(i - 1));
      }
      out.singular_values(i) = refined;
    }
  }
  return out;
}

Matrix project_rank_k(const Matrix& m, int k) {
  const Eigen::Index n = m.cols();
  if (k < 1 || k > n) {
    throw std::invalid_argument("project_rank_k: k must satisfy 1 <= k <= cols, got k=" +
                                std::to_string(k) + " with cols=" + std::to_string(n));
  }
  require_finite(m, "project_rank_k");
  if (k == n) {
    return m;  // full-rank truncation is the identity, bit for bit
  }
  GramEigen eig = gram_eigen(m);
  Matrix h = eig.vectors.leftCols(k);
  return (m * h) * h.transpose();
}

SubspaceComplement row_space_complement(const Matrix& m, int r) {
  const Eigen::Index n = m.cols();
  if (r < 1 || r >= n) {
    throw std::invalid_argument(
        "row_space_complement: r must satisfy 1 <= r < cols (r == cols has an empty "
        "complement), got r=" +
        std::to_string(r));
  }
  require_finite(m, "row_space_complement");
  GramEigen eig = gram_eigen(m);
  // Refined singular values ||m h|| resolve far below the sqrt(eps) floor of
  // the Gram eigenvalues, which the 1e-10 effective-rank gate needs.
  const double sigma1 = (m * eig.vectors.col(0)).norm();
  const double sigma_r = (m * eig.vectors.col(r - 1)).norm();
  if (sigma_r <= 1e-10 * sigma1) {
    throw std::invalid_argument(
        "row_space_complement: effective rank below r (sigma_r <= 1e-10 * sigma_1)");
  }
  SubspaceComplement out;
  out.rank = r;
  out.basis = eig.vectors.rightCols(n - r);
  for (Eigen::Index i = 0; i < out.basis.cols(); ++i) {
    canonicalize_column_sign(out.basis, i);
  }
  return out;
}

double misalignment(const Matrix& v, const SubspaceComplement& complement) {
  if (v.cols() != complement.basis.rows()) {
    throw std::invalid_argument("misalignment: matrix columns must match complement dimension");
  }
  if (complement.basis.cols() == 0) {
    return 0.0;
  }
  return (v * complement.basis).squaredNorm();
}

double frobenius_mse(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("frobenius_mse: shape mismatch");
  }
  return (a - b).squaredNorm() / (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

}  // namespace tsvdtd
