#pragma once

#include <string>
#include <vector>

#include "axl/common.hpp"

namespace axl {

/// Cumulative payoff accounting for one learner against a fixed benchmark
/// family, plus everything needed to evaluate the worst-case guarantee:
/// the per-epoch running maximum of the observed gradient norms, the L1
/// diameter of the feasible set (2P in the reduced space), and the noise
/// bound of the observation model.
class RegretLedger {
 public:
  RegretLedger(std::vector<std::string> benchmark_names, double eta,
               double total_power, int carriers, std::vector<int> open_dims);

  /// Record one epoch: the policy's payoff, each benchmark's payoff under
  /// the same realized channels, and the epoch's largest observed gradient
  /// norm.
  void record_epoch(double policy_payoff,
                    const std::vector<double>& benchmark_payoffs,
                    double gradient_norm);

  int horizon() const { return static_cast<int>(policy_cumulative_.size()); }
  std::size_t num_benchmarks() const { return benchmark_names_.size(); }
  const std::vector<std::string>& benchmark_names() const {
    return benchmark_names_;
  }

  /// (sum_{t<=T} payoff(P0;t) - sum_{t<=T} payoff(P(t);t)) / T.
  double average_regret(std::size_t benchmark, int upto_epoch) const;

  /// Largest average regret over the benchmark family at epoch T.
  double max_average_regret(int upto_epoch) const;

  /// Worst-case guarantee R(T)/sqrt(T) with
  /// R(T) = (log K + sum_k log m_k)/eta + 4 P^2 M_T^2 eta and M_T the
  /// running gradient-norm maximum through epoch T.
  double theoretical_bound(int upto_epoch) const;

  double running_gradient_bound(int upto_epoch) const;
  double diameter() const { return 2.0 * total_power_; }
  double entropy_budget() const { return entropy_budget_; }

  void set_noise_bound(double sigma) { noise_bound_ = sigma; }
  double noise_bound() const { return noise_bound_; }

 private:
  std::vector<std::string> benchmark_names_;
  double eta_;
  double total_power_;
  double entropy_budget_;  // log K + sum_k log m_k
  double noise_bound_ = 0.0;
  std::vector<double> policy_cumulative_;                // per epoch
  std::vector<std::vector<double>> benchmark_cumulative_;  // [bench][epoch]
  std::vector<double> running_m_;                        // per epoch
};

struct EfficiencyReport {
  std::vector<double> sum_rates;  // Psi(t), nats
  double psi_max = 0.0;
  double psi_min = 0.0;
  int min_vertex_samples = 0;     // size of the sample behind psi_min
  std::vector<double> efficiency;  // (Psi - Psi_min)/(Psi_max - Psi_min)
};

/// Normalized efficiency series. Throws InvalidInputError when
/// psi_max <= psi_min (undefined ratio) or a value escapes
/// [psi_min, psi_max + 1e-9].
EfficiencyReport make_efficiency_report(std::vector<double> sum_rates,
                                        double psi_max, double psi_min,
                                        int min_vertex_samples);

}  // namespace axl
