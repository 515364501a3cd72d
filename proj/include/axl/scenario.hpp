#pragma once

#include <string>
#include <vector>

#include "axl/channel_sim.hpp"
#include "axl/metrics.hpp"
#include "axl/policies.hpp"

namespace axl {

/// Outcome of one dynamic (regret-kind) run: a ledger per secondary user,
/// the per-epoch guarantee-violation count, and the realized noise record.
struct RegretRunSummary {
  std::string policy;
  std::vector<std::string> benchmark_names;
  std::vector<RegretLedger> ledgers;  // one per SU
  long long bound_violations = 0;     // avg regret above the running bound
  bool bound_asserted = false;        // true for perfect-CSI axl runs
  NoiseStats noise_stats;
};

RegretRunSummary run_regret_scenario(const ScenarioConfig& cfg);

/// Outcome of one tracking run: per-epoch rates of the learner against the
/// per-epoch optimum and the uniform/randomized comparison policies.
struct TrackingRunSummary {
  std::vector<std::string> policies;  // axl, uniform, randomized, optimum
  // rates[su][policy][epoch], nats
  std::vector<std::vector<std::vector<double>>> rates;
};

TrackingRunSummary run_tracking_scenario(const ScenarioConfig& cfg);

/// Static multiple-access-channel experiment: every policy in cfg.policies
/// is run with perfect observations and (when a noise model is configured)
/// once more under noise; each run records the sum-rate efficiency series
/// against the jointly optimal and minimal sum rates.
struct StaticMacRun {
  std::string policy;  // axl | iwf | swf
  std::string noise;   // "none" or the configured noise kind
  EfficiencyReport report;
};

struct StaticMacSummary {
  std::vector<StaticMacRun> runs;
  double psi_max = 0.0;
  double psi_min = 0.0;
  double certificate_gap = 0.0;
  int vertex_samples = 0;
  NoiseStats noise_stats;
};

StaticMacSummary run_static_mac(const ScenarioConfig& cfg);

/// The noise-and-primary-whitened static channels [su][carrier] the MAC run
/// is built on; deterministic in cfg.rng_seed. Exposed so external checks can
/// recompute capacities independently of the solver.
std::vector<std::vector<Matrix>> static_mac_channels(const ScenarioConfig& cfg);

/// File-writing front ends used by the CLI: CSV series plus a metadata.json
/// with the realized constants. Return the process exit code (0 ok, 3 when a
/// perfect-CSI guarantee check failed).
int run_scenario_to_files(const ScenarioConfig& cfg, const std::string& out_dir);
int run_static_mac_to_files(const ScenarioConfig& cfg,
                            const std::string& out_dir);

std::string noise_kind_name(NoiseModel::Kind kind);

}  // namespace axl
