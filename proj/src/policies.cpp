#include "axl/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace axl {

namespace {

double discount(double eta, int epoch) {
  return eta / std::sqrt(static_cast<double>(std::max(epoch, 1)));
}

std::vector<DensityMatrix> gibbs_covariances(
    const std::vector<HermitianMatrix>& scores, double gamma) {
  std::vector<DensityMatrix> covs;
  covs.reserve(scores.size());
  for (const HermitianMatrix& y : scores) {
    covs.push_back(matrix_gibbs_map(HermitianMatrix(gamma * y.mat())));
  }
  return covs;
}

Vector mapped_powers(const Vector& scores, double gamma,
                     const ConstraintSet& cs, PowerMode mode) {
  if (mode == PowerMode::simple) {
    return cs.total_power * gibbs_map(gamma * scores).weights;
  }
  return capped_gibbs_map(gamma * scores, cs.caps, cs.total_power).powers;
}

Vector mapped_powers(const Vector& scores, double gamma,
                     const ConstraintSet& cs) {
  return mapped_powers(scores, gamma, cs,
                       cs.simple_mode() ? PowerMode::simple
                                        : PowerMode::capped);
}

/// Trace-norm distance between two profiles, summed over carriers.
double profile_distance(const TransmitProfile& a, const TransmitProfile& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.covariances.size(); ++k) {
    Matrix diff = a.powers(static_cast<Eigen::Index>(k)) * a.covariances[k].mat() -
                  b.powers(static_cast<Eigen::Index>(k)) * b.covariances[k].mat();
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    d += es.eigenvalues().cwiseAbs().sum();
  }
  return d;
}

}  // namespace

AxlState AxlState::initial(const ConstraintSet& cs, double eta) {
  if (eta <= 0.0) throw InvalidInputError("AxlState: eta must be positive");
  AxlState s;
  s.epoch = 1;
  s.eta = eta;
  s.mode = cs.simple_mode() ? PowerMode::simple : PowerMode::capped;
  s.power_scores = Vector::Zero(cs.num_carriers);
  s.cov_scores.reserve(cs.open_dims.size());
  for (int m : cs.open_dims) s.cov_scores.push_back(HermitianMatrix::Zero(m));
  return s;
}

TransmitProfile axl_profile(const AxlState& state, const ConstraintSet& cs) {
  if (state.epoch < 1) {
    throw InvalidInputError("axl_profile: epoch counter must be >= 1");
  }
  const double gamma = discount(state.eta, state.epoch);
  TransmitProfile profile;
  profile.powers = mapped_powers(state.power_scores, gamma, cs, state.mode);
  profile.covariances = gibbs_covariances(state.cov_scores, gamma);
  return profile;
}

AxlState axl_update(const AxlState& state, const TransmitProfile& played,
                    const std::vector<HermitianMatrix>& observed,
                    double total_power) {
  if (observed.size() != state.cov_scores.size() ||
      played.covariances.size() != state.cov_scores.size()) {
    throw InvalidInputError("axl_update: carrier count mismatch");
  }
  AxlState next = state;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const Eigen::Index ki = static_cast<Eigen::Index>(k);
    next.power_scores(ki) +=
        total_power *
        (observed[k].mat() * played.covariances[k].mat()).trace().real();
    next.cov_scores[k] = HermitianMatrix(
        state.cov_scores[k].mat() + played.powers(ki) * observed[k].mat());
  }
  next.epoch = state.epoch + 1;
  return next;
}

double optimal_eta(double total_power, double gradient_bound, int carriers,
                   const std::vector<int>& open_dims) {
  if (total_power <= 0.0 || gradient_bound <= 0.0 || carriers < 1 ||
      open_dims.size() != static_cast<std::size_t>(carriers)) {
    throw InvalidInputError("optimal_eta: inputs must be positive");
  }
  double entropy_budget = std::log(static_cast<double>(carriers));
  for (int m : open_dims) {
    if (m < 1) throw InvalidInputError("optimal_eta: open dimension < 1");
    entropy_budget += std::log(static_cast<double>(m));
  }
  if (entropy_budget <= 0.0) {
    throw InvalidInputError(
        "optimal_eta: degenerate decision set (K = 1, m = 1) has no entropy "
        "term to balance");
  }
  return std::sqrt(entropy_budget) / (2.0 * total_power * gradient_bound);
}

TransmitProfile uniform_profile(const ConstraintSet& cs) {
  const int carriers = cs.num_carriers;
  Vector p = Vector::Constant(carriers, cs.total_power / carriers);
  std::vector<bool> saturated(static_cast<std::size_t>(carriers), false);
  // Clip at the caps and spread the excess equally over unsaturated carriers.
  for (int round = 0; round < carriers; ++round) {
    double excess = 0.0;
    int open = 0;
    for (int k = 0; k < carriers; ++k) {
      if (saturated[static_cast<std::size_t>(k)]) continue;
      if (p(k) >= cs.caps(k) - 1e-15) {
        excess += p(k) - cs.caps(k);
        p(k) = cs.caps(k);
        saturated[static_cast<std::size_t>(k)] = true;
      } else {
        ++open;
      }
    }
    if (excess <= 0.0 || open == 0) break;
    const double add = excess / open;
    for (int k = 0; k < carriers; ++k) {
      if (!saturated[static_cast<std::size_t>(k)]) p(k) += add;
    }
  }
  TransmitProfile profile;
  profile.powers = std::move(p);
  profile.covariances.reserve(cs.open_dims.size());
  for (int m : cs.open_dims) {
    profile.covariances.push_back(DensityMatrix::MaxEntropy(m));
  }
  validate_profile(profile, cs);
  return profile;
}

std::vector<Benchmark> benchmark_set(const ConstraintSet& cs) {
  const int m = cs.open_dims.front();
  for (int mk : cs.open_dims) {
    if (mk != m) {
      throw InvalidInputError(
          "benchmark_set: needs equal open dimensions on every carrier");
    }
  }
  std::vector<Benchmark> benchmarks;
  TransmitProfile uniform = uniform_profile(cs);
  benchmarks.push_back({"uniform", uniform});

  auto closed_profile = [&](const std::vector<int>& closed) {
    Matrix q = Matrix::Identity(m, m);
    for (int i : closed) q(i, i) = 0.0;
    q /= static_cast<double>(m - static_cast<int>(closed.size()));
    TransmitProfile profile;
    profile.powers = uniform.powers;
    DensityMatrix cov = unit_trace_psd_unchecked(HermitianMatrix(q));
    profile.covariances.assign(static_cast<std::size_t>(cs.num_carriers), cov);
    return profile;
  };

  for (int i = 0; i < m; ++i) {
    if (m - 1 < 1) break;  // closing every dimension is rejected
    benchmarks.push_back(
        {"close_" + std::to_string(i), closed_profile({i})});
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (m - 2 < 1) break;
      benchmarks.push_back({"close_" + std::to_string(i) + "_" +
                                std::to_string(j),
                            closed_profile({i, j})});
    }
  }
  return benchmarks;
}

RandomizedPolicyState RandomizedPolicyState::initial(const ConstraintSet& cs,
                                                     double r) {
  if (r < 0.0 || r > 1.0) {
    throw InvalidInputError("RandomizedPolicyState: discount outside [0, 1]");
  }
  RandomizedPolicyState s;
  s.discount = r;
  s.covariances.reserve(cs.open_dims.size());
  for (int m : cs.open_dims) {
    s.covariances.push_back(DensityMatrix::MaxEntropy(m));
  }
  return s;
}

RandomizedPolicyState randomized_step(const RandomizedPolicyState& state,
                                      Rng& rng) {
  RandomizedPolicyState next = state;
  for (std::size_t k = 0; k < state.covariances.size(); ++k) {
    DensityMatrix draw = sample_unit_trace_psd(state.covariances[k].dim(), rng);
    next.covariances[k] = unit_trace_psd_unchecked(
        HermitianMatrix((1.0 - state.discount) * state.covariances[k].mat() +
                        state.discount * draw.mat()));
  }
  return next;
}

DensityMatrix sample_unit_trace_psd(Eigen::Index dim, Rng& rng) {
  Matrix g(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    for (Eigen::Index row = 0; row < dim; ++row) {
      g(row, col) = rng.cnormal();
    }
  }
  Matrix w = g * g.adjoint();
  const double tr = w.trace().real();
  if (tr <= 0.0) return DensityMatrix::MaxEntropy(dim);
  return unit_trace_psd_unchecked(HermitianMatrix(w / tr));
}

TransmitProfile xlpa_profile(const XlPaState& state, const ConstraintSet& cs,
                             const std::vector<DensityMatrix>& fixed_covs) {
  const double gamma = discount(state.eta, state.epoch);
  TransmitProfile profile;
  profile.powers = mapped_powers(state.scores, gamma, cs);
  profile.covariances = fixed_covs;
  return profile;
}

XlPaState xlpa_update(const XlPaState& state, const TransmitProfile& played,
                      const std::vector<HermitianMatrix>& observed,
                      double total_power) {
  XlPaState next = state;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    next.scores(static_cast<Eigen::Index>(k)) +=
        total_power *
        (observed[k].mat() * played.covariances[k].mat()).trace().real();
  }
  next.epoch = state.epoch + 1;
  return next;
}

TransmitProfile xlcov_profile(const XlCovState& state,
                              const Vector& fixed_powers) {
  const double gamma = discount(state.eta, state.epoch);
  TransmitProfile profile;
  profile.powers = fixed_powers;
  profile.covariances = gibbs_covariances(state.scores, gamma);
  return profile;
}

XlCovState xlcov_update(const XlCovState& state, const TransmitProfile& played,
                        const std::vector<HermitianMatrix>& observed) {
  XlCovState next = state;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    next.scores[k] = HermitianMatrix(
        state.scores[k].mat() +
        played.powers(static_cast<Eigen::Index>(k)) * observed[k].mat());
  }
  next.epoch = state.epoch + 1;
  return next;
}

Vector water_fill(const Vector& gains, double total) {
  if (total <= 0.0) throw InvalidInputError("water_fill: total must be > 0");
  const Eigen::Index n = gains.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return gains(a) > gains(b); });

  Vector x = Vector::Zero(n);
  Eigen::Index positive = 0;
  while (positive < n && gains(order[static_cast<std::size_t>(positive)]) > 0.0) {
    ++positive;
  }
  if (positive == 0) {
    x.setConstant(total / static_cast<double>(n));
    return x;
  }

  // Active set: the j strongest modes share water level
  // mu = (total + sum 1/g) / j; pick the largest j keeping every share > 0.
  double inv_sum = 0.0;
  double mu = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index j = 0; j < positive; ++j) {
    const double g = gains(order[static_cast<std::size_t>(j)]);
    inv_sum += 1.0 / g;
    const double candidate = (total + inv_sum) / static_cast<double>(j + 1);
    if (candidate - 1.0 / g <= 0.0) break;
    mu = candidate;
    active = j + 1;
  }
  for (Eigen::Index j = 0; j < active; ++j) {
    const Eigen::Index idx = order[static_cast<std::size_t>(j)];
    x(idx) = mu - 1.0 / gains(idx);
  }
  return x;
}

WaterFillResult water_filling_profile(const ChannelEpoch& epoch,
                                      const ConstraintSet& cs) {
  std::vector<HermitianMatrix> grams;
  grams.reserve(epoch.effective_channels.size());
  for (const Matrix& h : epoch.effective_channels) {
    grams.emplace_back(h.adjoint() * h);
  }
  WaterFillResult result;
  result.profile = water_fill_from_grams(grams, cs);
  result.value = rate(result.profile, epoch);
  return result;
}

std::vector<HermitianMatrix> best_response_grams(
    const std::vector<std::vector<Matrix>>& channels,
    const std::vector<TransmitProfile>& profiles, int user) {
  const std::size_t ui = static_cast<std::size_t>(user);
  const int carriers = static_cast<int>(channels[ui].size());
  const Eigen::Index rx = channels[ui].front().rows();
  std::vector<HermitianMatrix> grams;
  grams.reserve(static_cast<std::size_t>(carriers));
  for (int k = 0; k < carriers; ++k) {
    const std::size_t ki = static_cast<std::size_t>(k);
    Matrix w = Matrix::Identity(rx, rx);
    for (std::size_t q = 0; q < channels.size(); ++q) {
      if (q == ui) continue;
      const double p = profiles[q].powers(k);
      if (p == 0.0) continue;
      const Matrix& g = channels[q][ki];
      w += p * (g * profiles[q].covariances[ki].mat() * g.adjoint());
    }
    Matrix ht = inv_sqrtm(HermitianMatrix(std::move(w))).mat() * channels[ui][ki];
    grams.emplace_back(ht.adjoint() * ht);
  }
  return grams;
}

TransmitProfile water_fill_from_grams(const std::vector<HermitianMatrix>& grams,
                                      const ConstraintSet& cs) {
  if (!cs.simple_mode()) {
    throw InvalidInputError(
        "water_fill_from_grams: per-carrier caps must be subsumed by the "
        "budget");
  }
  std::vector<EigenSystem> modes;
  std::vector<double> all_gains;
  for (const HermitianMatrix& g : grams) {
    modes.push_back(eigensystem(g));
    for (Eigen::Index j = 0; j < modes.back().values.size(); ++j) {
      all_gains.push_back(std::max(modes.back().values(j), 0.0));
    }
  }
  Vector gains = Eigen::Map<Vector>(all_gains.data(),
                                    static_cast<Eigen::Index>(all_gains.size()));
  Vector x = water_fill(gains, cs.total_power);
  TransmitProfile profile;
  profile.powers = Vector::Zero(cs.num_carriers);
  Eigen::Index cursor = 0;
  for (int k = 0; k < cs.num_carriers; ++k) {
    const EigenSystem& es = modes[static_cast<std::size_t>(k)];
    const Eigen::Index m = es.values.size();
    Vector xk = x.segment(cursor, m);
    cursor += m;
    const double pk = xk.sum();
    profile.powers(k) = pk;
    if (pk > 0.0) {
      Matrix q = es.vectors * (xk / pk).asDiagonal() * es.vectors.adjoint();
      profile.covariances.push_back(
          unit_trace_psd_unchecked(HermitianMatrix(std::move(q))));
    } else {
      profile.covariances.push_back(DensityMatrix::MaxEntropy(m));
    }
  }
  return profile;
}

std::vector<TransmitProfile> iwf_step(
    const std::vector<std::vector<Matrix>>& channels,
    std::vector<TransmitProfile> profiles, const ConstraintSet& cs, int user) {
  profiles[static_cast<std::size_t>(user)] =
      water_fill_from_grams(best_response_grams(channels, profiles, user), cs);
  return profiles;
}

std::vector<TransmitProfile> swf_step(
    const std::vector<std::vector<Matrix>>& channels,
    const std::vector<TransmitProfile>& profiles, const ConstraintSet& cs) {
  std::vector<TransmitProfile> next = profiles;
  for (std::size_t user = 0; user < profiles.size(); ++user) {
    next[user] = water_fill_from_grams(
        best_response_grams(channels, profiles, static_cast<int>(user)), cs);
  }
  return next;
}

namespace {

TransmitProfile random_feasible_profile(const ConstraintSet& cs, Rng& rng) {
  Vector scores(cs.num_carriers);
  for (Eigen::Index k = 0; k < scores.size(); ++k) scores(k) = 3.0 * rng.normal();
  TransmitProfile profile;
  profile.powers = mapped_powers(scores, 1.0, cs);
  profile.covariances.reserve(cs.open_dims.size());
  for (int m : cs.open_dims) {
    profile.covariances.push_back(sample_unit_trace_psd(m, rng));
  }
  return profile;
}

}  // namespace

OracleResult best_fixed_oracle(const std::vector<ChannelEpoch>& epochs,
                               const ConstraintSet& cs,
                               const OracleOptions& opt) {
  if (epochs.empty()) {
    throw InvalidInputError("best_fixed_oracle: empty epoch list");
  }
  const double inv_t = 1.0 / static_cast<double>(epochs.size());
  TransmitProfile profile = uniform_profile(cs);

  auto averaged_grads = [&](const TransmitProfile& at) {
    std::vector<HermitianMatrix> acc;
    for (std::size_t t = 0; t < epochs.size(); ++t) {
      std::vector<HermitianMatrix> g = gradient_matrices(at, epochs[t]);
      if (t == 0) {
        acc = std::move(g);
      } else {
        for (std::size_t k = 0; k < acc.size(); ++k) {
          acc[k] = HermitianMatrix(acc[k].mat() + g[k].mat());
        }
      }
    }
    for (auto& a : acc) a = HermitianMatrix(inv_t * a.mat());
    return acc;
  };

  // Base step from the gradient scale at the uniform start.
  std::vector<HermitianMatrix> g0 = averaged_grads(profile);
  double scale = 1e-12;
  for (std::size_t k = 0; k < g0.size(); ++k) {
    scale = std::max(scale, cs.total_power * g0[k].spectral_norm());
  }
  const double base_step = 2.0 * opt.step_scale / scale;

  Vector z_pow = Vector::Zero(cs.num_carriers);
  std::vector<HermitianMatrix> z_cov;
  for (int m : cs.open_dims) z_cov.push_back(HermitianMatrix::Zero(m));

  int iters = 0;
  for (int i = 1; i <= opt.max_iterations; ++i) {
    iters = i;
    std::vector<HermitianMatrix> grads =
        i == 1 ? std::move(g0) : averaged_grads(profile);
    const double step = base_step / std::sqrt(static_cast<double>(i));
    Vector v = marginal_utilities(grads, profile, cs.total_power);
    z_pow += step * v;
    for (std::size_t k = 0; k < grads.size(); ++k) {
      z_cov[k] = HermitianMatrix(
          z_cov[k].mat() + step * profile.powers(static_cast<Eigen::Index>(k)) *
                               grads[k].mat());
    }
    TransmitProfile next;
    next.powers = mapped_powers(z_pow, 1.0, cs);
    next.covariances = gibbs_covariances(z_cov, 1.0);
    const double move = profile_distance(next, profile);
    profile = std::move(next);
    if (move < opt.movement_tol && i > 8) break;
  }

  // Cumulative-gradient certificate against the benchmark family and random
  // feasible probes: by concavity the true gap cannot exceed the sampled one
  // at any probed point.
  std::vector<HermitianMatrix> grad_sum;
  double value = 0.0;
  for (const ChannelEpoch& epoch : epochs) {
    value += rate(profile, epoch);
    std::vector<HermitianMatrix> g = gradient_matrices(profile, epoch);
    if (grad_sum.empty()) {
      grad_sum = std::move(g);
    } else {
      for (std::size_t k = 0; k < grad_sum.size(); ++k) {
        grad_sum[k] = HermitianMatrix(grad_sum[k].mat() + g[k].mat());
      }
    }
  }
  auto gap_at = [&](const TransmitProfile& candidate) {
    double gap = 0.0;
    for (std::size_t k = 0; k < grad_sum.size(); ++k) {
      const Eigen::Index ki = static_cast<Eigen::Index>(k);
      Matrix diff = candidate.powers(ki) * candidate.covariances[k].mat() -
                    profile.powers(ki) * profile.covariances[k].mat();
      gap += (grad_sum[k].mat() * diff).trace().real();
    }
    return gap;
  };
  double gap = 0.0;
  for (const Benchmark& b : benchmark_set(cs)) {
    gap = std::max(gap, gap_at(b.profile));
  }
  Rng rng(opt.rng_seed);
  for (int s = 0; s < opt.certificate_samples; ++s) {
    gap = std::max(gap, gap_at(random_feasible_profile(cs, rng)));
  }

  if (gap > opt.certificate_tol) {
    throw ConvergenceError("best_fixed_oracle: first-order gap " +
                               std::to_string(gap) + " after " +
                               std::to_string(iters) + " iterations",
                           gap);
  }
  return {std::move(profile), value, gap, iters};
}

OracleResult instantaneous_optimum(const ChannelEpoch& epoch,
                                   const ConstraintSet& cs,
                                   const OracleOptions& opt) {
  if (cs.simple_mode()) {
    WaterFillResult wf = water_filling_profile(epoch, cs);
    return {std::move(wf.profile), wf.value, 0.0, 0};
  }
  return best_fixed_oracle({epoch}, cs, opt);
}

}  // namespace axl
