#include "axl/hermitian.hpp"

#include <cmath>

namespace axl {

namespace {

constexpr double kDensityEigClamp = 1e-10;
constexpr double kDensityTraceTol = 1e-10;
constexpr double kRankThreshold = 1e-10;
constexpr double kPdThreshold = 1e-12;

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace

HermitianMatrix::HermitianMatrix(Matrix a) {
  if (a.rows() != a.cols()) {
    throw InvalidInputError("HermitianMatrix: input must be square");
  }
  mat_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::Zero(Eigen::Index dim) {
  return HermitianMatrix(Matrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::Identity(Eigen::Index dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim));
}

double HermitianMatrix::spectral_norm() const {
  if (dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

EigenSystem eigensystem(const HermitianMatrix& a) {
  if (!all_finite(a.mat())) {
    throw InvalidInputError("eigensystem: non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw InvalidInputError("eigensystem: decomposition failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

HermitianMatrix expm(const HermitianMatrix& a) {
  EigenSystem es = eigensystem(a);
  Vector w = es.values.array().exp();
  return HermitianMatrix(es.vectors * w.asDiagonal() * es.vectors.adjoint());
}

HermitianMatrix inv_sqrtm(const HermitianMatrix& a) {
  EigenSystem es = eigensystem(a);
  double max_eig = es.values.maxCoeff();
  double min_eig = es.values.minCoeff();
  if (min_eig <= kPdThreshold * std::max(max_eig, 0.0)) {
    throw SingularityError("inv_sqrtm: matrix not positive-definite", min_eig);
  }
  Vector w = es.values.array().rsqrt();
  return HermitianMatrix(es.vectors * w.asDiagonal() * es.vectors.adjoint());
}

Matrix nullspace_basis(const Matrix& u) {
  const Eigen::Index n = u.rows();
  const Eigen::Index r = u.cols();
  if (n <= 0) throw InvalidInputError("nullspace_basis: empty ambient space");
  if (r == 0) return Matrix::Identity(n, n);
  if (r >= n) {
    throw InvalidInputError("nullspace_basis: no dimensions left open");
  }
  if (!all_finite(u)) {
    throw InvalidInputError("nullspace_basis: non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kRankThreshold * sv(0)) ++rank;
  }
  if (rank < r) {
    throw InvalidInputError("nullspace_basis: constraint matrix is rank-deficient");
  }
  return svd.matrixU().rightCols(n - r);
}

DensityMatrix::DensityMatrix(HermitianMatrix base) : base_(std::move(base)) {
  const double tr = base_.trace_real();
  if (std::abs(tr - 1.0) > kDensityTraceTol) {
    throw InvalidInputError("DensityMatrix: trace differs from 1 by " +
                            std::to_string(tr - 1.0));
  }
  EigenSystem es = eigensystem(base_);
  const double min_eig = es.values.minCoeff();
  if (min_eig < -kDensityEigClamp) {
    throw InvalidInputError("DensityMatrix: eigenvalue " +
                            std::to_string(min_eig) + " below -1e-10");
  }
  if (min_eig < 0.0) {
    Vector w = es.values.cwiseMax(0.0);
    base_ = HermitianMatrix(es.vectors * w.asDiagonal() * es.vectors.adjoint());
  }
}

DensityMatrix DensityMatrix::MaxEntropy(Eigen::Index dim) {
  Matrix q = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(HermitianMatrix(std::move(q)), Unchecked{});
}

DensityMatrix unit_trace_psd_unchecked(HermitianMatrix base) {
  return DensityMatrix(std::move(base), DensityMatrix::Unchecked{});
}

}  // namespace axl
