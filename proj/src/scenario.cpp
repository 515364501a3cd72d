#include "axl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace axl {

namespace {

using nlohmann::json;

std::string policy_for_run(const ScenarioConfig& cfg) {
  std::string policy = cfg.policies.empty() ? "axl" : cfg.policies.front();
  if (policy != "axl" && policy != "uniform" && policy != "randomized") {
    throw ConfigError("dynamic runs support policies axl, uniform, randomized",
                      "policies");
  }
  return policy;
}

double max_gradient_norm(const std::vector<HermitianMatrix>& grads) {
  double m = 0.0;
  for (const HermitianMatrix& g : grads) m = std::max(m, g.spectral_norm());
  return m;
}

}  // namespace

std::string noise_kind_name(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::none: return "none";
    case NoiseModel::Kind::bounded_uniform: return "bounded-uniform";
    case NoiseModel::Kind::truncated_gaussian: return "truncated-gaussian";
  }
  return "none";
}

RegretRunSummary run_regret_scenario(const ScenarioConfig& cfg) {
  NetworkState state(cfg);
  const int num_su = cfg.num_su;
  const std::string policy = policy_for_run(cfg);

  RegretRunSummary summary;
  summary.policy = policy;
  summary.bound_asserted =
      policy == "axl" && cfg.noise.kind == NoiseModel::Kind::none;

  std::vector<std::vector<Benchmark>> benches;
  std::vector<TransmitProfile> uniforms;
  std::vector<AxlState> axl_states;
  std::vector<RandomizedPolicyState> rand_states;
  std::vector<Rng> noise_rngs;
  std::vector<Rng> rand_rngs;
  for (int s = 0; s < num_su; ++s) {
    const ConstraintSet& cs = state.su_constraints(s);
    benches.push_back(benchmark_set(cs));
    uniforms.push_back(uniform_profile(cs));
    axl_states.push_back(AxlState::initial(cs, cfg.eta));
    rand_states.push_back(
        RandomizedPolicyState::initial(cs, cfg.randomized_discount));
    noise_rngs.push_back(state.fork_rng(0x2015e, static_cast<std::uint64_t>(s)));
    rand_rngs.push_back(state.fork_rng(0x2a2d, static_cast<std::uint64_t>(s)));
    std::vector<std::string> names;
    for (const Benchmark& b : benches.back()) names.push_back(b.name);
    if (s == 0) summary.benchmark_names = names;
    summary.ledgers.emplace_back(names, cfg.eta, cs.total_power,
                                 cs.num_carriers, cs.open_dims);
  }

  std::vector<TransmitProfile> profiles(static_cast<std::size_t>(num_su));
  for (int t = 1; t <= cfg.horizon; ++t) {
    for (int s = 0; s < num_su; ++s) {
      const std::size_t si = static_cast<std::size_t>(s);
      if (policy == "axl") {
        profiles[si] = axl_profile(axl_states[si], state.su_constraints(s));
      } else if (policy == "uniform") {
        profiles[si] = uniforms[si];
      } else {
        profiles[si] = TransmitProfile{uniforms[si].powers,
                                       rand_states[si].covariances};
      }
      state.set_su_covariances(
          s, lift_profile(profiles[si], state.su_constraints(s)));
    }
    for (int s = 0; s < num_su; ++s) {
      const std::size_t si = static_cast<std::size_t>(s);
      const ConstraintSet& cs = state.su_constraints(s);
      ChannelEpoch epoch = state.effective_channels(s);
      const double phi = rate(profiles[si], epoch);
      std::vector<HermitianMatrix> grads =
          gradient_matrices(profiles[si], epoch);
      std::vector<HermitianMatrix> observed = observe_gradients(
          grads, cfg.noise, noise_rngs[si], &summary.noise_stats);
      std::vector<double> bench_phis;
      bench_phis.reserve(benches[si].size());
      for (const Benchmark& b : benches[si]) {
        bench_phis.push_back(rate(b.profile, epoch));
      }
      summary.ledgers[si].record_epoch(phi, bench_phis,
                                       max_gradient_norm(observed));
      if (policy == "axl") {
        axl_states[si] =
            axl_update(axl_states[si], profiles[si], observed, cs.total_power);
      } else if (policy == "randomized") {
        rand_states[si] = randomized_step(rand_states[si], rand_rngs[si]);
      }
    }
    if (t < cfg.horizon) state.advance_epoch();
  }

  for (auto& ledger : summary.ledgers) {
    ledger.set_noise_bound(summary.noise_stats.max_norm);
    for (int t = 1; t <= ledger.horizon(); ++t) {
      const double bound = ledger.theoretical_bound(t);
      for (std::size_t b = 0; b < ledger.num_benchmarks(); ++b) {
        if (ledger.average_regret(b, t) > bound + 1e-9) {
          ++summary.bound_violations;
        }
      }
    }
  }
  return summary;
}

TrackingRunSummary run_tracking_scenario(const ScenarioConfig& cfg) {
  NetworkState state(cfg);
  const int num_su = cfg.num_su;

  TrackingRunSummary summary;
  summary.policies = {"axl", "uniform", "randomized", "optimum"};
  summary.rates.assign(
      static_cast<std::size_t>(num_su),
      std::vector<std::vector<double>>(summary.policies.size()));

  std::vector<TransmitProfile> uniforms;
  std::vector<AxlState> axl_states;
  std::vector<RandomizedPolicyState> rand_states;
  std::vector<Rng> noise_rngs;
  std::vector<Rng> rand_rngs;
  for (int s = 0; s < num_su; ++s) {
    const ConstraintSet& cs = state.su_constraints(s);
    uniforms.push_back(uniform_profile(cs));
    axl_states.push_back(AxlState::initial(cs, cfg.eta));
    rand_states.push_back(
        RandomizedPolicyState::initial(cs, cfg.randomized_discount));
    noise_rngs.push_back(state.fork_rng(0x2015e, static_cast<std::uint64_t>(s)));
    rand_rngs.push_back(state.fork_rng(0x2a2d, static_cast<std::uint64_t>(s)));
  }

  NoiseStats noise_stats;
  std::vector<TransmitProfile> profiles(static_cast<std::size_t>(num_su));
  for (int t = 1; t <= cfg.horizon; ++t) {
    for (int s = 0; s < num_su; ++s) {
      const std::size_t si = static_cast<std::size_t>(s);
      profiles[si] = axl_profile(axl_states[si], state.su_constraints(s));
      state.set_su_covariances(
          s, lift_profile(profiles[si], state.su_constraints(s)));
    }
    for (int s = 0; s < num_su; ++s) {
      const std::size_t si = static_cast<std::size_t>(s);
      const ConstraintSet& cs = state.su_constraints(s);
      ChannelEpoch epoch = state.effective_channels(s);
      summary.rates[si][0].push_back(rate(profiles[si], epoch));
      summary.rates[si][1].push_back(rate(uniforms[si], epoch));
      summary.rates[si][2].push_back(
          rate(TransmitProfile{uniforms[si].powers, rand_states[si].covariances},
               epoch));
      summary.rates[si][3].push_back(
          instantaneous_optimum(epoch, cs).value);
      std::vector<HermitianMatrix> observed = observe_gradients(
          gradient_matrices(profiles[si], epoch), cfg.noise, noise_rngs[si],
          &noise_stats);
      axl_states[si] =
          axl_update(axl_states[si], profiles[si], observed, cs.total_power);
      rand_states[si] = randomized_step(rand_states[si], rand_rngs[si]);
    }
    if (t < cfg.horizon) state.advance_epoch();
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Static multiple access channel
// ---------------------------------------------------------------------------

namespace {

struct MacProblem {
  int carriers = 0;
  int rx = 0;
  int num_su = 0;
  ConstraintSet cs;  // shared by every SU
  std::vector<std::vector<Matrix>> channels;  // [su][k], noise-whitened, n x m
};

MacProblem build_mac_problem(const ScenarioConfig& cfg) {
  if (cfg.su.caps.size() != 0 &&
      cfg.su.caps.minCoeff() < cfg.su.total_power) {
    throw ConfigError(
        "static-mac runs need per-carrier caps subsumed by the budget",
        "su_constraints.caps");
  }
  MacProblem prob;
  prob.carriers = cfg.num_carriers;
  prob.rx = cfg.rx_antennas;
  prob.num_su = cfg.num_su;
  prob.cs = ConstraintSet::uncapped(cfg.num_carriers, cfg.su.total_power,
                                    cfg.tx_antennas);

  Rng rng(cfg.rng_seed);
  Rng chan_rng = rng.fork(0x57a7, 0);
  const int users = cfg.num_pu + cfg.num_su;
  std::vector<std::vector<Matrix>> raw(static_cast<std::size_t>(users));
  for (int q = 0; q < users; ++q) {
    raw[static_cast<std::size_t>(q)].reserve(
        static_cast<std::size_t>(cfg.num_carriers));
    for (int k = 0; k < cfg.num_carriers; ++k) {
      Matrix h(cfg.rx_antennas, cfg.tx_antennas);
      for (Eigen::Index col = 0; col < h.cols(); ++col) {
        for (Eigen::Index row = 0; row < h.rows(); ++row) {
          h(row, col) = chan_rng.cnormal();
        }
      }
      raw[static_cast<std::size_t>(q)].push_back(std::move(h));
    }
  }

  prob.channels.assign(static_cast<std::size_t>(cfg.num_su), {});
  for (int k = 0; k < cfg.num_carriers; ++k) {
    Matrix w0 = cfg.noise_power *
                Matrix::Identity(cfg.rx_antennas, cfg.rx_antennas);
    for (int p = 0; p < cfg.num_pu; ++p) {
      const Matrix& h = raw[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
      w0 += (cfg.pu_power / cfg.tx_antennas) * (h * h.adjoint());
    }
    HermitianMatrix whitener = inv_sqrtm(HermitianMatrix(std::move(w0)));
    for (int s = 0; s < cfg.num_su; ++s) {
      prob.channels[static_cast<std::size_t>(s)].push_back(
          whitener.mat() *
          raw[static_cast<std::size_t>(cfg.num_pu + s)][static_cast<std::size_t>(k)]);
    }
  }
  return prob;
}

/// I + sum_s G_s C_s G_s^H for one carrier.
Matrix mac_signal_matrix(const MacProblem& prob,
                         const std::vector<TransmitProfile>& profiles, int k) {
  Matrix b = Matrix::Identity(prob.rx, prob.rx);
  for (int s = 0; s < prob.num_su; ++s) {
    const std::size_t si = static_cast<std::size_t>(s);
    const double p = profiles[si].powers(k);
    if (p == 0.0) continue;
    const Matrix& g = prob.channels[si][static_cast<std::size_t>(k)];
    b += p * (g * profiles[si].covariances[static_cast<std::size_t>(k)].mat() *
              g.adjoint());
  }
  return b;
}

double mac_sum_rate(const MacProblem& prob,
                    const std::vector<TransmitProfile>& profiles) {
  double psi = 0.0;
  for (int k = 0; k < prob.carriers; ++k) {
    Eigen::LLT<Matrix> llt(mac_signal_matrix(prob, profiles, k));
    if (llt.info() != Eigen::Success) {
      throw InvalidInputError("mac_sum_rate: signal matrix not PD");
    }
    for (Eigen::Index i = 0; i < prob.rx; ++i) {
      psi += 2.0 * std::log(llt.matrixLLT()(i, i).real());
    }
  }
  return psi;
}

/// Joint sum-rate gradient blocks: M_{s,k} = G_s^H B_k^{-1} G_s with one
/// factorization of B_k shared across users. These equal each user's own
/// gradient under interference whitening, which is what makes the
/// distributed updates climb the common objective.
std::vector<std::vector<HermitianMatrix>> mac_gradients(
    const MacProblem& prob, const std::vector<TransmitProfile>& profiles) {
  std::vector<std::vector<HermitianMatrix>> grads(
      static_cast<std::size_t>(prob.num_su));
  for (int k = 0; k < prob.carriers; ++k) {
    Eigen::LLT<Matrix> llt(mac_signal_matrix(prob, profiles, k));
    for (int s = 0; s < prob.num_su; ++s) {
      const std::size_t si = static_cast<std::size_t>(s);
      const Matrix& g = prob.channels[si][static_cast<std::size_t>(k)];
      grads[si].emplace_back(g.adjoint() * llt.solve(g));
    }
  }
  return grads;
}

/// Exact first-order optimality gap over the product feasible set (caps
/// subsumed by the budget, so the linear maximization has the closed form
/// P * max_k lambda_max(M_k) per user).
double mac_exact_gap(const MacProblem& prob,
                     const std::vector<TransmitProfile>& profiles,
                     const std::vector<std::vector<HermitianMatrix>>& grads) {
  double gap = 0.0;
  for (int s = 0; s < prob.num_su; ++s) {
    const std::size_t si = static_cast<std::size_t>(s);
    double lin_max = 0.0;
    double current = 0.0;
    for (int k = 0; k < prob.carriers; ++k) {
      const std::size_t ki = static_cast<std::size_t>(k);
      lin_max = std::max(lin_max, grads[si][ki].spectral_norm());
      current += profiles[si].powers(k) *
                 (grads[si][ki].mat() * profiles[si].covariances[ki].mat())
                     .trace()
                     .real();
    }
    gap += prob.cs.total_power * lin_max - current;
  }
  return gap;
}

struct PsiMaxResult {
  double value = 0.0;
  double gap = 0.0;
  int sweeps = 0;
};

/// Jointly optimal sum rate: cyclic exact best responses (monotone ascent on
/// the concave objective) until the exact first-order gap certifies
/// optimality; a long entropic-ascent polish covers stalls.
PsiMaxResult solve_psi_max(const MacProblem& prob, double tol) {
  std::vector<TransmitProfile> profiles(
      static_cast<std::size_t>(prob.num_su), uniform_profile(prob.cs));
  double gap = std::numeric_limits<double>::infinity();
  int sweep = 0;
  for (sweep = 1; sweep <= 800; ++sweep) {
    for (int s = 0; s < prob.num_su; ++s) {
      profiles = iwf_step(prob.channels, std::move(profiles), prob.cs, s);
    }
    gap = mac_exact_gap(prob, profiles, mac_gradients(prob, profiles));
    if (gap < tol) break;
  }
  if (gap >= tol) {
    // Entropic-ascent polish with constant step on the shared score variables.
    std::vector<Vector> z_pow(static_cast<std::size_t>(prob.num_su),
                              Vector::Zero(prob.carriers));
    std::vector<std::vector<HermitianMatrix>> z_cov(
        static_cast<std::size_t>(prob.num_su));
    for (auto& z : z_cov) {
      for (int m : prob.cs.open_dims) z.push_back(HermitianMatrix::Zero(m));
    }
    double grad_scale = 1e-12;
    {
      auto grads = mac_gradients(prob, profiles);
      for (const auto& user_grads : grads) {
        for (const HermitianMatrix& g : user_grads) {
          grad_scale = std::max(grad_scale,
                                prob.cs.total_power * g.spectral_norm());
        }
      }
    }
    const double step = 0.5 / grad_scale;
    for (int i = 1; i <= 200000 && gap >= tol; ++i) {
      auto grads = mac_gradients(prob, profiles);
      for (int s = 0; s < prob.num_su; ++s) {
        const std::size_t si = static_cast<std::size_t>(s);
        Vector v = marginal_utilities(grads[si], profiles[si],
                                      prob.cs.total_power);
        z_pow[si] += step * v;
        for (int k = 0; k < prob.carriers; ++k) {
          const std::size_t ki = static_cast<std::size_t>(k);
          z_cov[si][ki] = HermitianMatrix(
              z_cov[si][ki].mat() +
              step * profiles[si].powers(k) * grads[si][ki].mat());
        }
      }
      for (int s = 0; s < prob.num_su; ++s) {
        const std::size_t si = static_cast<std::size_t>(s);
        TransmitProfile next;
        next.powers = prob.cs.total_power * gibbs_map(z_pow[si]).weights;
        std::vector<DensityMatrix> covs;
        for (int k = 0; k < prob.carriers; ++k) {
          covs.push_back(matrix_gibbs_map(HermitianMatrix(
              z_cov[si][static_cast<std::size_t>(k)].mat())));
        }
        next.covariances = std::move(covs);
        profiles[si] = std::move(next);
      }
      if (i % 64 == 0) {
        gap = mac_exact_gap(prob, profiles, mac_gradients(prob, profiles));
      }
    }
    gap = mac_exact_gap(prob, profiles, mac_gradients(prob, profiles));
    if (gap >= tol) {
      throw ConvergenceError("solve_psi_max: optimality gap " +
                                 std::to_string(gap) + " above tolerance",
                             gap);
    }
  }
  return {mac_sum_rate(prob, profiles), gap, sweep};
}

/// Sampled minimum of the concave sum rate over the extreme points of the
/// product feasible set: every user puts its whole budget on one carrier
/// with a rank-one covariance.
double solve_psi_min(const MacProblem& prob, int samples, Rng& rng) {
  const int m = prob.cs.open_dims.front();
  auto vertex_profile = [&](int carrier, const CVector& dir) {
    TransmitProfile profile;
    profile.powers = Vector::Zero(prob.carriers);
    profile.powers(carrier) = prob.cs.total_power;
    Matrix q = dir * dir.adjoint();
    for (int k = 0; k < prob.carriers; ++k) {
      profile.covariances.push_back(
          unit_trace_psd_unchecked(HermitianMatrix(q)));
    }
    return profile;
  };
  auto random_unit = [&]() {
    CVector u(m);
    for (Eigen::Index i = 0; i < m; ++i) u(i) = rng.cnormal();
    return CVector(u / u.norm());
  };

  double best = std::numeric_limits<double>::infinity();
  // Structured candidates: everyone stacked on the same carrier and basis
  // direction, the natural worst case for a shared receiver.
  for (int k = 0; k < prob.carriers; ++k) {
    for (int i = 0; i < m; ++i) {
      CVector e = CVector::Zero(m);
      e(i) = 1.0;
      std::vector<TransmitProfile> joint(
          static_cast<std::size_t>(prob.num_su), vertex_profile(k, e));
      best = std::min(best, mac_sum_rate(prob, joint));
    }
  }
  for (int it = 0; it < samples; ++it) {
    std::vector<TransmitProfile> joint;
    joint.reserve(static_cast<std::size_t>(prob.num_su));
    for (int s = 0; s < prob.num_su; ++s) {
      const int k = static_cast<int>(rng.next_u64() %
                                     static_cast<std::uint64_t>(prob.carriers));
      joint.push_back(vertex_profile(k, random_unit()));
    }
    best = std::min(best, mac_sum_rate(prob, joint));
  }
  return best;
}

std::vector<double> run_mac_policy(const MacProblem& prob,
                                   const ScenarioConfig& cfg,
                                   const std::string& policy,
                                   const NoiseModel& noise, Rng rng,
                                   NoiseStats* stats) {
  std::vector<double> psi;
  psi.reserve(static_cast<std::size_t>(cfg.horizon));
  std::vector<TransmitProfile> profiles(
      static_cast<std::size_t>(prob.num_su), uniform_profile(prob.cs));

  if (policy == "axl") {
    std::vector<AxlState> states(
        static_cast<std::size_t>(prob.num_su),
        AxlState::initial(prob.cs, cfg.eta));
    for (int it = 1; it <= cfg.horizon; ++it) {
      for (int s = 0; s < prob.num_su; ++s) {
        profiles[static_cast<std::size_t>(s)] =
            axl_profile(states[static_cast<std::size_t>(s)], prob.cs);
      }
      psi.push_back(mac_sum_rate(prob, profiles));
      auto grads = mac_gradients(prob, profiles);
      for (int s = 0; s < prob.num_su; ++s) {
        const std::size_t si = static_cast<std::size_t>(s);
        auto observed = observe_gradients(grads[si], noise, rng, stats);
        states[si] = axl_update(states[si], profiles[si], observed,
                                prob.cs.total_power);
      }
    }
    return psi;
  }

  if (policy == "iwf") {
    for (int it = 1; it <= cfg.horizon; ++it) {
      const int s = (it - 1) % prob.num_su;
      auto grams = observe_gradients(
          best_response_grams(prob.channels, profiles, s), noise, rng, stats);
      profiles[static_cast<std::size_t>(s)] =
          water_fill_from_grams(grams, prob.cs);
      psi.push_back(mac_sum_rate(prob, profiles));
    }
    return psi;
  }

  if (policy == "swf") {
    for (int it = 1; it <= cfg.horizon; ++it) {
      std::vector<TransmitProfile> next = profiles;
      for (int s = 0; s < prob.num_su; ++s) {
        auto grams = observe_gradients(
            best_response_grams(prob.channels, profiles, s), noise, rng, stats);
        next[static_cast<std::size_t>(s)] =
            water_fill_from_grams(grams, prob.cs);
      }
      profiles = std::move(next);
      psi.push_back(mac_sum_rate(prob, profiles));
    }
    return psi;
  }

  throw ConfigError("static-mac supports policies axl, iwf, swf", "policies");
}

}  // namespace

std::vector<std::vector<Matrix>> static_mac_channels(const ScenarioConfig& cfg) {
  return build_mac_problem(cfg).channels;
}

StaticMacSummary run_static_mac(const ScenarioConfig& cfg) {
  MacProblem prob = build_mac_problem(cfg);
  StaticMacSummary summary;

  PsiMaxResult max_result = solve_psi_max(prob, 1e-7);
  summary.certificate_gap = max_result.gap;
  // The certified upper bound on the optimum keeps every achieved sum rate
  // inside [psi_min, psi_max].
  summary.psi_max = max_result.value + max_result.gap;

  Rng seed_rng(cfg.rng_seed);
  Rng vertex_rng = seed_rng.fork(0x3e97ull, 1);
  summary.vertex_samples = 10000;
  summary.psi_min = solve_psi_min(prob, summary.vertex_samples, vertex_rng);

  std::vector<std::pair<std::string, NoiseModel>> noise_settings;
  noise_settings.emplace_back("none", NoiseModel{});
  if (cfg.noise.kind != NoiseModel::Kind::none) {
    noise_settings.emplace_back(noise_kind_name(cfg.noise.kind), cfg.noise);
  }

  std::vector<std::pair<std::string, std::vector<double>>> series;
  for (const std::string& policy : cfg.policies) {
    for (const auto& [noise_name, noise] : noise_settings) {
      Rng run_rng = seed_rng.fork(
          0x90ull, static_cast<std::uint64_t>(series.size()));
      std::vector<double> psi = run_mac_policy(prob, cfg, policy, noise,
                                               run_rng, &summary.noise_stats);
      series.emplace_back(policy + "/" + noise_name, std::move(psi));
    }
  }

  // A sampled minimum is only an upper bound on the true one; fold in any
  // achieved value below it so the efficiency series stays in [0, 1].
  for (const auto& [label, psi] : series) {
    for (double v : psi) summary.psi_min = std::min(summary.psi_min, v);
  }

  std::size_t idx = 0;
  for (const std::string& policy : cfg.policies) {
    for (const auto& [noise_name, noise] : noise_settings) {
      summary.runs.push_back(
          {policy, noise_name,
           make_efficiency_report(std::move(series[idx].second),
                                  summary.psi_max, summary.psi_min,
                                  summary.vertex_samples)});
      ++idx;
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// File emission
// ---------------------------------------------------------------------------

namespace {

void append_config_metadata(json& meta, const ScenarioConfig& cfg) {
  meta["config"] = {
      {"K", cfg.num_carriers},
      {"num_PU", cfg.num_pu},
      {"num_SU", cfg.num_su},
      {"tx_antennas", cfg.tx_antennas},
      {"rx_antennas", cfg.rx_antennas},
      {"carrier_frequency", cfg.carrier_frequency},
      {"epoch_duration", cfg.epoch_duration},
      {"user_speed", {cfg.user_speed_min, cfg.user_speed_max}},
      {"pu_arrival_rate", cfg.pu_arrival_rate},
      {"pu_departure_rate", cfg.pu_departure_rate},
      {"noise_power", cfg.noise_power},
      {"pu_power", cfg.pu_power},
      {"rng_seed", cfg.rng_seed},
      {"horizon", cfg.horizon},
      {"eta", cfg.eta},
      {"kind", cfg.kind},
      {"policies", cfg.policies},
      {"subcarrier_correlated", cfg.subcarrier_correlated},
      {"randomized_discount", cfg.randomized_discount},
      {"noise",
       {{"kind", noise_kind_name(cfg.noise.kind)},
        {"sigma", cfg.noise.sigma},
        {"relative_level", cfg.noise.relative_level}}},
      {"su_constraints",
       {{"total_power", cfg.su.total_power},
        {"null_dims", cfg.su.null_dims}}},
  };
}

std::FILE* open_csv(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw Error("cannot open output file: " + path.string());
  return f;
}

}  // namespace

int run_scenario_to_files(const ScenarioConfig& cfg,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  json meta;
  append_config_metadata(meta, cfg);

  int exit_code = 0;
  if (cfg.kind == "tracking") {
    TrackingRunSummary summary = run_tracking_scenario(cfg);
    std::FILE* f = open_csv(dir / "tracking.csv");
    std::fputs("epoch,user,policy,rate_nats\n", f);
    for (std::size_t s = 0; s < summary.rates.size(); ++s) {
      for (std::size_t p = 0; p < summary.policies.size(); ++p) {
        const auto& series = summary.rates[s][p];
        for (std::size_t t = 0; t < series.size(); ++t) {
          std::fprintf(f, "%zu,%zu,%s,%.17g\n", t + 1, s,
                       summary.policies[p].c_str(), series[t]);
        }
      }
    }
    std::fclose(f);
    meta["experiment"] = "tracking";
  } else {
    RegretRunSummary summary = run_regret_scenario(cfg);
    std::FILE* f = open_csv(dir / "regret.csv");
    std::fputs("epoch,user,benchmark,avg_regret,bound\n", f);
    for (std::size_t s = 0; s < summary.ledgers.size(); ++s) {
      const RegretLedger& ledger = summary.ledgers[s];
      for (int t = 1; t <= ledger.horizon(); ++t) {
        const double bound = ledger.theoretical_bound(t);
        for (std::size_t b = 0; b < ledger.num_benchmarks(); ++b) {
          std::fprintf(f, "%d,%zu,%s,%.17g,%.17g\n", t, s,
                       ledger.benchmark_names()[b].c_str(),
                       ledger.average_regret(b, t), bound);
        }
      }
    }
    std::fclose(f);
    meta["experiment"] = "regret";
    meta["policy"] = summary.policy;
    meta["bound_violations"] = summary.bound_violations;
    meta["bound_asserted"] = summary.bound_asserted;
    meta["noise_truncation_rate"] = summary.noise_stats.truncation_rate();
    meta["realized_noise_bound"] = summary.noise_stats.max_norm;
    json realized = json::array();
    for (const RegretLedger& ledger : summary.ledgers) {
      realized.push_back(ledger.horizon() > 0
                             ? ledger.running_gradient_bound(ledger.horizon())
                             : 0.0);
    }
    meta["realized_gradient_bound"] = realized;
    if (summary.bound_asserted && summary.bound_violations > 0) exit_code = 3;
  }

  std::ofstream meta_out(dir / "metadata.json");
  meta_out << meta.dump(2) << "\n";
  return exit_code;
}

int run_static_mac_to_files(const ScenarioConfig& cfg,
                            const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  StaticMacSummary summary = run_static_mac(cfg);

  std::FILE* f = open_csv(dir / "efficiency.csv");
  std::fputs("iter,policy,noise,eff\n", f);
  for (const StaticMacRun& run : summary.runs) {
    for (std::size_t t = 0; t < run.report.efficiency.size(); ++t) {
      std::fprintf(f, "%zu,%s,%s,%.17g\n", t + 1, run.policy.c_str(),
                   run.noise.c_str(), run.report.efficiency[t]);
    }
  }
  std::fclose(f);

  json meta;
  append_config_metadata(meta, cfg);
  meta["experiment"] = "static-mac";
  meta["psi_max"] = summary.psi_max;
  meta["psi_min"] = summary.psi_min;
  meta["certificate_gap"] = summary.certificate_gap;
  meta["min_vertex_samples"] = summary.vertex_samples;
  meta["noise_truncation_rate"] = summary.noise_stats.truncation_rate();
  meta["realized_noise_bound"] = summary.noise_stats.max_norm;
  std::ofstream meta_out(dir / "metadata.json");
  meta_out << meta.dump(2) << "\n";
  return 0;
}

}  // namespace axl
