#pragma once

#include <vector>

#include "axl/common.hpp"

namespace axl {

/// Dense complex matrix kept exactly Hermitian by symmetrizing on
/// construction: A <- (A + A^H)/2. Immutable after construction.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix a);

  static HermitianMatrix Zero(Eigen::Index dim);
  static HermitianMatrix Identity(Eigen::Index dim);

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }

  double trace_real() const { return mat_.trace().real(); }
  double spectral_norm() const;
  double frobenius_norm() const { return mat_.norm(); }

 private:
  Matrix mat_;
};

struct EigenSystem {
  Vector values;   // ascending
  Matrix vectors;  // unitary; column j pairs with values[j]
};

/// Eigendecomposition A = U diag(values) U^H. Throws InvalidInputError on
/// non-finite input.
EigenSystem eigensystem(const HermitianMatrix& a);

/// Matrix exponential through the eigendecomposition; result is Hermitian
/// positive-definite.
HermitianMatrix expm(const HermitianMatrix& a);

/// Inverse square root A^{-1/2} of a positive-definite matrix. Throws
/// SingularityError (carrying the minimum eigenvalue) when the smallest
/// eigenvalue falls below 1e-12 times the largest.
HermitianMatrix inv_sqrtm(const HermitianMatrix& a);

/// Orthonormal basis of the orthogonal complement of range(u), as the columns
/// of an n x (n - r) matrix. u must be n x r with full column rank (r < n,
/// relative rank threshold 1e-10); r = 0 yields the identity. Throws
/// InvalidInputError on rank-deficient input.
Matrix nullspace_basis(const Matrix& u);

/// Unit-trace positive-semidefinite matrix. Eigenvalues in [-1e-10, 0) caused
/// by roundoff are clamped to zero on construction; anything more negative, or
/// a trace off unity by more than 1e-10, is rejected.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix base);

  /// I/m, the maximum-entropy point of the spectrahedron.
  static DensityMatrix MaxEntropy(Eigen::Index dim);

  Eigen::Index dim() const { return base_.dim(); }
  const Matrix& mat() const { return base_.mat(); }
  const HermitianMatrix& hermitian() const { return base_; }

 private:
  struct Unchecked {};
  DensityMatrix(HermitianMatrix base, Unchecked) : base_(std::move(base)) {}

  friend DensityMatrix unit_trace_psd_unchecked(HermitianMatrix base);

  HermitianMatrix base_;
};

/// Wraps a matrix known PSD and unit-trace by construction without re-running
/// the eigendecomposition check. Callers own the proof obligation.
DensityMatrix unit_trace_psd_unchecked(HermitianMatrix base);

}  // namespace axl
