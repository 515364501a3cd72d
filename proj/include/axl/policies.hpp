#pragma once

#include <string>
#include <vector>

#include "axl/convex_maps.hpp"
#include "axl/rate_model.hpp"

namespace axl {

/// Power-map selection: the softmax rule when the per-carrier caps are
/// subsumed by the budget, the cap-respecting lambda rule otherwise.
enum class PowerMode { simple, capped };

/// Learner memory of the augmented exponential policy: additive score
/// variables per carrier plus the epoch counter. `epoch` is the index of the
/// epoch whose profile the choice maps produce next, so the first profile is
/// computed at epoch 1 from zero scores (uniform start) and the score sums
/// run through epoch - 1.
struct AxlState {
  int epoch = 1;
  double eta = 1.0;
  PowerMode mode = PowerMode::simple;
  Vector power_scores;                       // y_k
  std::vector<HermitianMatrix> cov_scores;   // Y_k, size m_k each

  /// Zero scores at epoch 1; mode picked from the constraints (capped iff
  /// some cap is below the budget).
  static AxlState initial(const ConstraintSet& cs, double eta);
};

/// Choice maps applied to the discounted scores eta * t^{-1/2} * scores.
/// Powers go through the softmax map when every cap is at least the budget
/// and through the cap-respecting map otherwise; covariances go through the
/// matrix Gibbs map.
TransmitProfile axl_profile(const AxlState& state, const ConstraintSet& cs);

/// Score accumulation y_k += P tr[M^_k Q_k], Y_k += p_k M^_k from the profile
/// actually played this epoch; pure transition to the next epoch.
AxlState axl_update(const AxlState& state, const TransmitProfile& played,
                    const std::vector<HermitianMatrix>& observed,
                    double total_power);

/// Learning rate minimizing A/eta + 4 P^2 M^2 eta with
/// A = log K + sum_k log m_k, i.e. sqrt(A) / (2 P M). Throws
/// InvalidInputError on nonpositive inputs or when A = 0 (single carrier,
/// single antenna: the bound has no entropy term).
double optimal_eta(double total_power, double gradient_bound, int carriers,
                   const std::vector<int>& open_dims);

/// Equal power split clipped to the caps, with any excess redistributed
/// equally among unsaturated carriers; isotropic covariances.
TransmitProfile uniform_profile(const ConstraintSet& cs);

struct Benchmark {
  std::string name;
  TransmitProfile profile;
};

/// The fixed comparator family: the uniform profile plus every way of
/// closing one or two transmit dimensions uniformly across carriers
/// (1 + C(m,1) + C(m,2) profiles for uniform m; combinations that would
/// close every dimension are skipped). Requires equal open dimensions on
/// all carriers.
std::vector<Benchmark> benchmark_set(const ConstraintSet& cs);

/// Feedback-free comparison policy: uniform powers with covariances mixed
/// towards fresh unit-trace PSD samples, Q <- (1-r) Q + r R.
struct RandomizedPolicyState {
  double discount = 0.9;  // r
  std::vector<DensityMatrix> covariances;

  static RandomizedPolicyState initial(const ConstraintSet& cs, double r);
};

RandomizedPolicyState randomized_step(const RandomizedPolicyState& state,
                                      Rng& rng);

/// G G^H / tr(G G^H) for G with i.i.d. standard complex Gaussian entries.
DensityMatrix sample_unit_trace_psd(Eigen::Index dim, Rng& rng);

/// Power-allocation-only learner (covariances held fixed).
struct XlPaState {
  int epoch = 1;
  double eta = 1.0;
  Vector scores;
};

TransmitProfile xlpa_profile(const XlPaState& state, const ConstraintSet& cs,
                             const std::vector<DensityMatrix>& fixed_covs);
XlPaState xlpa_update(const XlPaState& state, const TransmitProfile& played,
                      const std::vector<HermitianMatrix>& observed,
                      double total_power);

/// Covariance-only learner (powers held fixed).
struct XlCovState {
  int epoch = 1;
  double eta = 1.0;
  std::vector<HermitianMatrix> scores;
};

TransmitProfile xlcov_profile(const XlCovState& state,
                              const Vector& fixed_powers);
XlCovState xlcov_update(const XlCovState& state, const TransmitProfile& played,
                        const std::vector<HermitianMatrix>& observed);

/// Water level allocation: maximize sum_j log(1 + g_j x_j) subject to
/// x >= 0, sum x = total. Zero-gain entries receive zero; if no gain is
/// positive the budget is split equally.
Vector water_fill(const Vector& gains, double total);

struct WaterFillResult {
  TransmitProfile profile;
  double value;  // achieved rate, nats
};

/// Single-user water-filling best response against the epoch's effective
/// channels: power poured jointly over all carrier eigenmodes. Requires the
/// caps to be subsumed by the budget.
WaterFillResult water_filling_profile(const ChannelEpoch& epoch,
                                      const ConstraintSet& cs);

/// Gram matrices a water-filling step eigendecomposes for `user` at a shared
/// receiver: own channel whitened against noise plus every other user's
/// current signal. channels[user][carrier] are noise-whitened n x m blocks.
std::vector<HermitianMatrix> best_response_grams(
    const std::vector<std::vector<Matrix>>& channels,
    const std::vector<TransmitProfile>& profiles, int user);

/// Water-filling over (possibly noise-corrupted) Gram matrices; negative
/// eigenvalues from observation noise are clamped to zero.
TransmitProfile water_fill_from_grams(const std::vector<HermitianMatrix>& grams,
                                      const ConstraintSet& cs);

/// Sequential water-filling: `user` best-responds to everyone else's current
/// profiles; the rest are untouched.
std::vector<TransmitProfile> iwf_step(
    const std::vector<std::vector<Matrix>>& channels,
    std::vector<TransmitProfile> profiles, const ConstraintSet& cs, int user);

/// Simultaneous water-filling: every user best-responds to the previous
/// state at once. May oscillate; that behavior is reported, not an error.
std::vector<TransmitProfile> swf_step(
    const std::vector<std::vector<Matrix>>& channels,
    const std::vector<TransmitProfile>& profiles, const ConstraintSet& cs);

struct OracleOptions {
  int max_iterations = 100000;
  double movement_tol = 1e-8;    // L1 profile movement per iteration
  double certificate_tol = 1e-5; // first-order optimality gap
  int certificate_samples = 64;  // random feasible points probed
  double step_scale = 1.0;       // multiplies the auto-selected base step
  std::uint64_t rng_seed = 0xC3A7;
};

struct OracleResult {
  TransmitProfile profile;
  double value;            // sum over epochs of the rate at `profile`
  double certificate_gap;  // max first-order gap over the probe set
  int iterations;
};

/// Best fixed transmit profile in hindsight: deterministic mirror ascent on
/// the cumulative rate using the same choice maps, step ~ 1/sqrt(iter),
/// stopped on profile movement. The certificate bounds the optimality gap
/// over the benchmark set plus random feasible probes; exceeding
/// certificate_tol after max_iterations raises ConvergenceError carrying the
/// gap.
OracleResult best_fixed_oracle(const std::vector<ChannelEpoch>& epochs,
                               const ConstraintSet& cs,
                               const OracleOptions& opt = {});

/// Best profile for a single epoch. Uses the exact water-filling solution
/// when the caps are subsumed by the budget, the mirror-ascent path
/// otherwise.
OracleResult instantaneous_optimum(const ChannelEpoch& epoch,
                                   const ConstraintSet& cs,
                                   const OracleOptions& opt = {});

}  // namespace axl
