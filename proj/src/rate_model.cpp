#include "axl/rate_model.hpp"

#include <cmath>

namespace axl {

namespace {

constexpr double kProfileTol = 1e-9;
constexpr double kBasisTol = 1e-10;
constexpr double kLogDetEigFloor = -1e-12;

void check_dims(const TransmitProfile& profile, const ChannelEpoch& epoch) {
  const auto carriers = static_cast<std::size_t>(profile.powers.size());
  if (profile.covariances.size() != carriers ||
      epoch.effective_channels.size() != carriers) {
    throw InvalidInputError("rate: carrier count mismatch");
  }
  for (std::size_t k = 0; k < carriers; ++k) {
    if (epoch.effective_channels[k].cols() != profile.covariances[k].dim()) {
      throw InvalidInputError("rate: channel/covariance dimension mismatch");
    }
  }
}

}  // namespace

ConstraintSet ConstraintSet::uncapped(int num_carriers, double total_power,
                                      int antennas) {
  Vector caps = Vector::Constant(num_carriers, total_power);
  return make(num_carriers, total_power, std::move(caps), {}, antennas);
}

ConstraintSet ConstraintSet::make(int num_carriers, double total_power,
                                  Vector caps,
                                  std::vector<Matrix> null_bases,
                                  int antennas) {
  if (num_carriers <= 0 || antennas <= 0) {
    throw InvalidInputError("ConstraintSet: need at least one carrier/antenna");
  }
  if (caps.size() != num_carriers || (caps.array() <= 0.0).any()) {
    throw InvalidInputError("ConstraintSet: caps must be positive, one per carrier");
  }
  if (total_power <= 0.0 || total_power > caps.sum() * (1.0 + 1e-12)) {
    throw InfeasibleError("ConstraintSet: budget outside (0, sum of caps]");
  }
  if (null_bases.empty()) {
    null_bases.assign(static_cast<std::size_t>(num_carriers),
                      Matrix::Identity(antennas, antennas));
  }
  if (null_bases.size() != static_cast<std::size_t>(num_carriers)) {
    throw InvalidInputError("ConstraintSet: one null basis per carrier");
  }
  ConstraintSet cs;
  cs.num_carriers = num_carriers;
  cs.total_power = total_power;
  cs.caps = std::move(caps);
  cs.open_dims.reserve(null_bases.size());
  for (const Matrix& n : null_bases) {
    if (n.rows() != antennas || n.cols() < 1 || n.cols() > antennas) {
      throw InvalidInputError("ConstraintSet: null basis has bad shape");
    }
    const Matrix gram = n.adjoint() * n;
    if ((gram - Matrix::Identity(n.cols(), n.cols())).cwiseAbs().maxCoeff() >
        kBasisTol) {
      throw InvalidInputError("ConstraintSet: null basis not orthonormal");
    }
    cs.open_dims.push_back(static_cast<int>(n.cols()));
  }
  cs.null_bases = std::move(null_bases);
  return cs;
}

void validate_profile(const TransmitProfile& profile, const ConstraintSet& cs) {
  if (profile.powers.size() != cs.num_carriers ||
      profile.covariances.size() != static_cast<std::size_t>(cs.num_carriers)) {
    throw InvalidInputError("TransmitProfile: carrier count mismatch");
  }
  const double tol = kProfileTol * std::max(1.0, cs.total_power);
  if ((profile.powers.array() < -tol).any() ||
      ((profile.powers - cs.caps).array() > tol).any()) {
    throw InvalidInputError("TransmitProfile: power outside [0, cap]");
  }
  if (std::abs(profile.powers.sum() - cs.total_power) > tol) {
    throw InvalidInputError("TransmitProfile: powers do not sum to budget");
  }
  for (int k = 0; k < cs.num_carriers; ++k) {
    if (profile.covariances[static_cast<std::size_t>(k)].dim() !=
        cs.open_dims[static_cast<std::size_t>(k)]) {
      throw InvalidInputError("TransmitProfile: covariance dimension mismatch");
    }
  }
}

double rate(const TransmitProfile& profile, const ChannelEpoch& epoch) {
  check_dims(profile, epoch);
  double total = 0.0;
  for (std::size_t k = 0; k < profile.covariances.size(); ++k) {
    const double p = profile.powers(static_cast<Eigen::Index>(k));
    if (p == 0.0) continue;
    const Matrix& h = epoch.effective_channels[k];
    Matrix a = p * (h * profile.covariances[k].mat() * h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double lam = es.eigenvalues()(i);
      if (lam < kLogDetEigFloor * std::max(1.0, a.norm())) {
        throw InvalidInputError("rate: signal covariance not PSD");
      }
      total += std::log1p(std::max(lam, 0.0));
    }
  }
  return total;
}

std::vector<HermitianMatrix> gradient_matrices(const TransmitProfile& profile,
                                               const ChannelEpoch& epoch) {
  check_dims(profile, epoch);
  std::vector<HermitianMatrix> grads;
  grads.reserve(profile.covariances.size());
  for (std::size_t k = 0; k < profile.covariances.size(); ++k) {
    const Matrix& h = epoch.effective_channels[k];
    const double p = profile.powers(static_cast<Eigen::Index>(k));
    Matrix b = Matrix::Identity(h.rows(), h.rows());
    if (p != 0.0) b += p * (h * profile.covariances[k].mat() * h.adjoint());
    Matrix m = h.adjoint() * b.llt().solve(h);
    grads.emplace_back(std::move(m));
  }
  return grads;
}

Vector marginal_utilities(const std::vector<HermitianMatrix>& grads,
                          const TransmitProfile& profile, double total_power) {
  Vector v(static_cast<Eigen::Index>(grads.size()));
  for (std::size_t k = 0; k < grads.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) =
        total_power *
        (grads[k].mat() * profile.covariances[k].mat()).trace().real();
  }
  return v;
}

Vector marginal_utilities(const TransmitProfile& profile,
                          const ChannelEpoch& epoch, double total_power) {
  return marginal_utilities(gradient_matrices(profile, epoch), profile,
                            total_power);
}

std::vector<HermitianMatrix> covariance_gradients(
    const TransmitProfile& profile, const ChannelEpoch& epoch) {
  std::vector<HermitianMatrix> grads = gradient_matrices(profile, epoch);
  std::vector<HermitianMatrix> v;
  v.reserve(grads.size());
  for (std::size_t k = 0; k < grads.size(); ++k) {
    v.emplace_back(profile.powers(static_cast<Eigen::Index>(k)) *
                   grads[k].mat());
  }
  return v;
}

Matrix reduce_by_null_shaping(const Matrix& channel, const Matrix& null_basis) {
  if (channel.cols() != null_basis.rows()) {
    throw InvalidInputError("reduce_by_null_shaping: dimension mismatch");
  }
  return channel * null_basis;
}

std::vector<Matrix> lift_profile(const TransmitProfile& profile,
                                 const ConstraintSet& cs) {
  validate_profile(profile, cs);
  std::vector<Matrix> lifted;
  lifted.reserve(cs.null_bases.size());
  for (std::size_t k = 0; k < cs.null_bases.size(); ++k) {
    const Matrix& n = cs.null_bases[k];
    lifted.push_back(profile.powers(static_cast<Eigen::Index>(k)) *
                     (n * profile.covariances[k].mat() * n.adjoint()));
  }
  return lifted;
}

}  // namespace axl
