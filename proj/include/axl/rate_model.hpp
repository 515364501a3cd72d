#pragma once

#include <vector>

#include "axl/hermitian.hpp"

namespace axl {

/// Feasible-set description for one transmitter: total power budget, per-
/// carrier caps, and the orthonormal bases of the spatial directions left
/// open on each carrier. All learning runs in the reduced open_dims space, so
/// the forbidden-direction constraint holds exactly by construction.
struct ConstraintSet {
  int num_carriers = 0;            // K
  double total_power = 0.0;        // P
  Vector caps;                     // P_k, size K
  std::vector<Matrix> null_bases;  // N_k, full_dim x m_k, orthonormal columns
  std::vector<int> open_dims;      // m_k

  /// Unconstrained layout: caps equal to the budget, no forbidden
  /// directions (N_k = I_m).
  static ConstraintSet uncapped(int num_carriers, double total_power,
                                int antennas);

  /// General layout; null_bases may be empty (treated as identities of size
  /// `antennas`). Validates cap feasibility and basis orthonormality.
  static ConstraintSet make(int num_carriers, double total_power, Vector caps,
                            std::vector<Matrix> null_bases, int antennas);

  /// True when every cap is at least the budget, so the per-carrier caps are
  /// subsumed by the total power constraint.
  bool simple_mode() const {
    return caps.minCoeff() >= total_power * (1.0 - 1e-12);
  }
};

/// The decision variable: per-carrier powers and unit-trace covariances,
/// expressed in each carrier's reduced (open-dimension) basis.
struct TransmitProfile {
  Vector powers;                           // Watts, size K
  std::vector<DensityMatrix> covariances;  // Q_k, size m_k each
};

/// Throws InvalidInputError unless the profile matches the constraint set's
/// dimensions and lies in its feasible set (tolerance 1e-9).
void validate_profile(const TransmitProfile& profile, const ConstraintSet& cs);

/// One epoch's whitened, reduced channels for a single receiver.
struct ChannelEpoch {
  int epoch = 0;
  std::vector<Matrix> effective_channels;  // H~_k, n x m_k
  double bound_estimate = 0.0;             // running max of ||H~_k||_2
};

/// Achievable rate sum_k log det(I + p_k H~_k Q_k H~_k^H), in nats per
/// channel use. Computed through the eigenvalues of the PSD argument.
double rate(const TransmitProfile& profile, const ChannelEpoch& epoch);

/// Gradient blocks M_k = H~_k^H [I + H~_k P_k H~_k^H]^{-1} H~_k with
/// P_k = p_k Q_k; each is Hermitian PSD.
std::vector<HermitianMatrix> gradient_matrices(const TransmitProfile& profile,
                                               const ChannelEpoch& epoch);

/// Marginal utilities of the normalized powers, v_k = P tr[M_k Q_k].
Vector marginal_utilities(const TransmitProfile& profile,
                          const ChannelEpoch& epoch, double total_power);

/// Same, reusing precomputed gradient blocks.
Vector marginal_utilities(const std::vector<HermitianMatrix>& grads,
                          const TransmitProfile& profile, double total_power);

/// Covariance-direction gradients V_k = p_k M_k.
std::vector<HermitianMatrix> covariance_gradients(
    const TransmitProfile& profile, const ChannelEpoch& epoch);

/// Restrict a whitened channel to the open directions: H~_k N_k.
Matrix reduce_by_null_shaping(const Matrix& channel, const Matrix& null_basis);

/// Full-antenna-space signal covariances N_k (p_k Q_k) N_k^H, for
/// interference bookkeeping by other receivers.
std::vector<Matrix> lift_profile(const TransmitProfile& profile,
                                 const ConstraintSet& cs);

}  // namespace axl
