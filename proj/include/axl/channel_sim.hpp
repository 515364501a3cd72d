#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "axl/rate_model.hpp"

namespace axl {

/// Gradient-observation error model. `sigma` is an absolute spectral-norm
/// bound; when `relative_level` is positive the noise scale instead tracks a
/// fraction of ||M_k||_F epoch by epoch. Generated perturbations are always
/// Hermitian, conditionally mean-zero, and surely bounded.
struct NoiseModel {
  enum class Kind { none, bounded_uniform, truncated_gaussian };
  Kind kind = Kind::none;
  double sigma = 0.0;
  double relative_level = 0.0;
};

struct SuConstraintConfig {
  double total_power = 1.0;
  Vector caps;        // empty: caps equal to total_power on every carrier
  int null_dims = 0;  // reserved spatial directions per carrier
};

/// Full description of a simulation run; the epoch stream is a pure function
/// of this struct (seed included).
struct ScenarioConfig {
  int num_carriers = 8;  // K
  int num_pu = 2;
  int num_su = 4;
  int tx_antennas = 2;  // m
  int rx_antennas = 2;  // n
  double carrier_frequency = 2.0e9;  // Hz
  double epoch_duration = 5.0e-3;    // s
  double user_speed_min = 0.8;       // m/s
  double user_speed_max = 1.4;
  double pu_arrival_rate = 1.0;    // 1/s, off -> on
  double pu_departure_rate = 1.0;  // 1/s, on -> off
  double noise_power = 1.0;        // W
  double pu_power = 4.0;           // W per carrier while on
  SuConstraintConfig su;
  NoiseModel noise;
  std::uint64_t rng_seed = 1;
  int horizon = 5000;  // T (epochs, or iterations for static runs)
  double eta = 1.0;
  std::string kind = "regret";  // regret | tracking
  std::vector<std::string> policies = {"axl", "iwf", "swf"};
  bool subcarrier_correlated = false;
  double randomized_discount = 0.9;

  void validate() const;  // throws ConfigError
};

/// Parse a JSON scenario file. Keys match the struct field names; unknown
/// keys are rejected with a ConfigError naming the key.
ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::string& path);

/// Sum-of-sinusoids Rayleigh fading for one transmitter->receiver link:
/// 16 equally spaced arrival-angle oscillators with random phases per matrix
/// entry, independent across entries and (by default) across subcarriers.
/// Per-entry average path gain is 1 and the autocorrelation follows
/// J0(2 pi f_d tau).
class JakesLink {
 public:
  static constexpr int kOscillators = 16;

  JakesLink(int carriers, int rx, int tx, double doppler_hz,
            double epoch_duration, bool correlated_carriers, Rng rng);

  void advance();
  const Matrix& channel(int carrier) const {
    return channels_[static_cast<std::size_t>(carrier)];
  }
  double doppler_hz() const { return doppler_hz_; }

 private:
  void materialize();

  int carriers_, rx_, tx_, groups_;
  double doppler_hz_;
  long long steps_since_renorm_ = 0;
  std::vector<Complex> phasor_;  // current oscillator states
  std::vector<Complex> step_;    // per-epoch rotations e^{i w delta}
  std::vector<Matrix> channels_;
};

/// The dynamic environment: fading links from every transmitter to every
/// secondary receiver, primary-user on/off activity, and the per-user signal
/// covariances needed to assemble interference. Owned and advanced by a
/// single driver; independent runs use independent instances.
class NetworkState {
 public:
  explicit NetworkState(const ScenarioConfig& cfg);

  const ScenarioConfig& config() const { return cfg_; }
  int epoch() const { return epoch_; }
  int num_users() const { return cfg_.num_pu + cfg_.num_su; }

  /// Move to the next epoch: resample primary on/off activity, then advance
  /// every fading link by one epoch duration.
  void advance_epoch();

  bool pu_on(int pu) const { return pu_[static_cast<std::size_t>(pu)].on; }

  /// Channel from transmitter `tx_user` (PUs first, then SUs) to the
  /// receiver of secondary user `su`.
  const Matrix& channel(int tx_user, int su, int carrier) const;

  const ConstraintSet& su_constraints(int su) const {
    return su_constraints_[static_cast<std::size_t>(su)];
  }

  /// Install SU `su`'s current full-antenna-space covariances (one per
  /// carrier), as produced by lift_profile.
  void set_su_covariances(int su, std::vector<Matrix> cov);

  /// Interference-plus-noise covariance at SU `su`'s receiver on `carrier`:
  /// noise_power I plus every other active transmitter's contribution.
  HermitianMatrix mui_covariance(int su, int carrier) const;

  /// Whitened, null-shaping-reduced channels W^{-1/2} H N for SU `su` this
  /// epoch; updates the SU's running spectral-norm bound estimate.
  ChannelEpoch effective_channels(int su);

  /// Derived deterministic substream (used for policy/noise randomness so
  /// the fading draw order stays stable).
  Rng fork_rng(std::uint64_t a, std::uint64_t b = 0) { return rng_.fork(a, b); }

 private:
  struct PuProcess {
    bool on = false;
    double residual_s = 0.0;
  };

  std::size_t link_index(int tx_user, int su) const;

  ScenarioConfig cfg_;
  int epoch_ = 0;
  Rng rng_;
  std::vector<Rng> pu_rng_;
  std::vector<double> speeds_;  // per user, m/s
  std::vector<PuProcess> pu_;
  std::vector<JakesLink> links_;  // (tx_user, su) row-major
  std::vector<ConstraintSet> su_constraints_;
  std::vector<std::vector<Matrix>> su_covariances_;  // [su][carrier]
  std::vector<double> bound_estimates_;              // per SU
};

struct NoiseStats {
  long long draws = 0;
  long long rejected = 0;
  double max_norm = 0.0;
  double truncation_rate() const {
    return draws > 0 ? static_cast<double>(rejected) /
                           static_cast<double>(draws + rejected)
                     : 0.0;
  }
};

/// Noisy gradient observations M^_k = M_k + Xi_k. Truncated-Gaussian noise is
/// rejection-sampled at five entry standard deviations, which keeps it
/// exactly conditionally mean-zero while enforcing the hard norm bound;
/// rejections are counted in `stats`.
std::vector<HermitianMatrix> observe_gradients(
    const std::vector<HermitianMatrix>& grads, const NoiseModel& model,
    Rng& rng, NoiseStats* stats = nullptr);

}  // namespace axl
