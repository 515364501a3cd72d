#include <doctest.h>

#include <cmath>

#include "axl/policies.hpp"
#include "axl/reference.hpp"
#include "test_support.hpp"

using namespace axl;
using testing::random_complex;
using testing::random_hermitian;
using testing::random_vector;

namespace {

ChannelEpoch random_epoch(int carriers, int rx, int tx, Rng& rng) {
  ChannelEpoch epoch;
  epoch.epoch = 1;
  for (int k = 0; k < carriers; ++k) {
    epoch.effective_channels.push_back(random_complex(rx, tx, rng));
  }
  for (const Matrix& h : epoch.effective_channels) {
    epoch.bound_estimate =
        std::max(epoch.bound_estimate,
                 std::sqrt(HermitianMatrix(h.adjoint() * h).spectral_norm()));
  }
  return epoch;
}

}  // namespace

TEST_CASE("initial state plays the uniform profile") {
  ConstraintSet cs = ConstraintSet::uncapped(4, 2.0, 3);
  AxlState state = AxlState::initial(cs, 1.0);
  CHECK(state.epoch == 1);
  CHECK(state.power_scores.norm() == 0.0);
  TransmitProfile profile = axl_profile(state, cs);
  for (int k = 0; k < 4; ++k) {
    CHECK(profile.powers(k) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((profile.covariances[static_cast<std::size_t>(k)].mat() -
           Matrix::Identity(3, 3) / 3.0)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("profile at the first epoch applies the scores undiscounted") {
  ConstraintSet cs = ConstraintSet::uncapped(2, 1.0, 1);
  AxlState state = AxlState::initial(cs, 1.0);
  state.power_scores << std::log(2.0), 0.0;
  TransmitProfile profile = axl_profile(state, cs);
  CHECK(profile.powers(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(profile.powers(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("capped profile goes through the lambda equation") {
  ConstraintSet cs = ConstraintSet::make(2, 1.0, Vector::Ones(2), {}, 1);
  AxlState state = AxlState::initial(cs, 1.0);
  state.mode = PowerMode::capped;
  state.power_scores << std::log(3.0), 0.0;
  TransmitProfile profile = axl_profile(state, cs);
  CHECK(profile.powers(0) == doctest::Approx(0.6339746).epsilon(1e-6));
  CHECK(profile.powers(1) == doctest::Approx(0.3660254).epsilon(1e-6));
}

TEST_CASE("score update accumulates the observed gradients") {
  ConstraintSet cs = ConstraintSet::uncapped(1, 1.0, 1);
  AxlState state = AxlState::initial(cs, 1.0);
  TransmitProfile played = axl_profile(state, cs);

  std::vector<HermitianMatrix> zero{HermitianMatrix::Zero(1)};
  AxlState after_zero = axl_update(state, played, zero, cs.total_power);
  CHECK(after_zero.epoch == 2);
  CHECK(after_zero.power_scores.norm() == 0.0);
  CHECK(after_zero.cov_scores[0].mat().norm() == 0.0);

  std::vector<HermitianMatrix> half{
      HermitianMatrix(0.5 * Matrix::Identity(1, 1))};
  AxlState next = axl_update(state, played, half, cs.total_power);
  CHECK(next.power_scores(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(next.cov_scores[0].mat()(0, 0).real() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(state.power_scores.norm() == 0.0);  // pure transition
}

TEST_CASE("replaying a gradient stream is deterministic") {
  ConstraintSet cs = ConstraintSet::uncapped(3, 1.0, 2);
  Rng rng(51);
  std::vector<std::vector<HermitianMatrix>> stream;
  for (int t = 0; t < 12; ++t) {
    std::vector<HermitianMatrix> ms;
    for (int k = 0; k < 3; ++k) {
      Matrix b = random_complex(2, 2, rng);
      ms.emplace_back(b * b.adjoint());
    }
    stream.push_back(std::move(ms));
  }
  auto run = [&]() {
    AxlState s = AxlState::initial(cs, 1.0);
    for (const auto& ms : stream) {
      TransmitProfile p = axl_profile(s, cs);
      s = axl_update(s, p, ms, cs.total_power);
    }
    return s;
  };
  AxlState a = run();
  AxlState b = run();
  CHECK((a.power_scores - b.power_scores).norm() == 0.0);
  for (int k = 0; k < 3; ++k) {
    CHECK((a.cov_scores[static_cast<std::size_t>(k)].mat() -
           b.cov_scores[static_cast<std::size_t>(k)].mat())
              .norm() == 0.0);
  }
}

TEST_CASE("profile is invariant under uniform score shifts") {
  ConstraintSet cs = ConstraintSet::uncapped(3, 1.0, 2);
  Rng rng(52);
  AxlState state = AxlState::initial(cs, 1.0);
  state.epoch = 5;
  state.power_scores = random_vector(3, rng, 2.0);
  for (auto& y : state.cov_scores) {
    y = HermitianMatrix(random_hermitian(2, rng));
  }
  TransmitProfile base = axl_profile(state, cs);

  AxlState shifted = state;
  shifted.power_scores.array() += 3.7;
  for (auto& y : shifted.cov_scores) {
    y = HermitianMatrix(y.mat() + 2.9 * Matrix::Identity(2, 2));
  }
  TransmitProfile moved = axl_profile(shifted, cs);
  CHECK((base.powers - moved.powers).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 0; k < 3; ++k) {
    CHECK((base.covariances[static_cast<std::size_t>(k)].mat() -
           moved.covariances[static_cast<std::size_t>(k)].mat())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("one update in a frozen epoch does not reduce the rate") {
  Rng rng(53);
  for (int it = 0; it < 20; ++it) {
    ConstraintSet cs = ConstraintSet::uncapped(3, 1.0, 2);
    ChannelEpoch epoch = random_epoch(3, 2, 2, rng);
    AxlState state = AxlState::initial(cs, 0.01);
    state.epoch = 9;  // discount eta / sqrt(t) = 0.01 / 3
    TransmitProfile before = axl_profile(state, cs);
    const double phi_before = rate(before, epoch);
    auto grads = gradient_matrices(before, epoch);
    AxlState next = axl_update(state, before, grads, cs.total_power);
    next.epoch = state.epoch;  // isolate the score effect from the discount
    TransmitProfile after = axl_profile(next, cs);
    CHECK(rate(after, epoch) >= phi_before - 1e-9);
  }
}

TEST_CASE("power-only and covariance-only learners replicate the frozen runs") {
  ConstraintSet cs = ConstraintSet::uncapped(2, 1.0, 2);
  Rng rng(54);
  std::vector<std::vector<HermitianMatrix>> stream;
  for (int t = 0; t < 10; ++t) {
    std::vector<HermitianMatrix> ms;
    for (int k = 0; k < 2; ++k) {
      Matrix b = random_complex(2, 2, rng);
      ms.emplace_back(b * b.adjoint());
    }
    stream.push_back(std::move(ms));
  }

  // Covariances frozen at the uniform point: the power components of the
  // combined learner and the power-only learner must match bit for bit.
  std::vector<DensityMatrix> frozen_covs(2, DensityMatrix::MaxEntropy(2));
  {
    AxlState full = AxlState::initial(cs, 1.0);
    XlPaState pa{1, 1.0, Vector::Zero(2)};
    for (const auto& ms : stream) {
      TransmitProfile full_profile = axl_profile(full, cs);
      full_profile.covariances = frozen_covs;
      TransmitProfile pa_profile = xlpa_profile(pa, cs, frozen_covs);
      CHECK((full_profile.powers - pa_profile.powers).norm() == 0.0);
      full = axl_update(full, full_profile, ms, cs.total_power);
      pa = xlpa_update(pa, pa_profile, ms, cs.total_power);
      CHECK((full.power_scores - pa.scores).norm() == 0.0);
    }
  }

  // Powers frozen at uniform: covariance trajectories coincide exactly.
  {
    AxlState full = AxlState::initial(cs, 1.0);
    XlCovState cov{1, 1.0, {HermitianMatrix::Zero(2), HermitianMatrix::Zero(2)}};
    Vector fixed_powers = Vector::Constant(2, 0.5);
    for (const auto& ms : stream) {
      TransmitProfile full_profile = axl_profile(full, cs);
      full_profile.powers = fixed_powers;
      TransmitProfile cov_profile = xlcov_profile(cov, fixed_powers);
      for (int k = 0; k < 2; ++k) {
        CHECK((full_profile.covariances[static_cast<std::size_t>(k)].mat() -
               cov_profile.covariances[static_cast<std::size_t>(k)].mat())
                  .norm() == 0.0);
      }
      full = axl_update(full, full_profile, ms, cs.total_power);
      cov = xlcov_update(cov, cov_profile, ms);
      for (int k = 0; k < 2; ++k) {
        CHECK((full.cov_scores[static_cast<std::size_t>(k)].mat() -
               cov.scores[static_cast<std::size_t>(k)].mat())
                  .norm() == 0.0);
      }
    }
  }
}

TEST_CASE("learning-rate tuning minimizes the guarantee") {
  const std::vector<int> dims{2, 2};
  const double eta = optimal_eta(1.0, 1.0, 2, dims);
  const double budget = std::log(2.0) * 3.0;
  CHECK(eta == doctest::Approx(std::sqrt(budget) / 2.0).epsilon(1e-12));
  CHECK(eta == doctest::Approx(0.72098).epsilon(1e-4));

  auto guarantee = [&](double e) { return budget / e + 4.0 * e; };
  CHECK(guarantee(eta) == doctest::Approx(4.0 * std::sqrt(budget)).epsilon(1e-12));
  CHECK(guarantee(eta) == doctest::Approx(5.7678).epsilon(1e-4));

  // Golden-section search over the guarantee agrees with the closed form.
  double lo = 1e-3, hi = 10.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = hi - phi * (hi - lo);
    const double b = lo + phi * (hi - lo);
    if (guarantee(a) < guarantee(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  CHECK(eta == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));

  // Homogeneity and the degenerate case.
  CHECK(optimal_eta(2.0, 3.0, 2, dims) ==
        doctest::Approx(eta / 6.0).epsilon(1e-12));
  CHECK_THROWS_AS(optimal_eta(1.0, 1.0, 1, {1}), InvalidInputError);
  CHECK_THROWS_AS(optimal_eta(-1.0, 1.0, 2, dims), InvalidInputError);
}

TEST_CASE("uniform profile redistributes the excess above the caps") {
  ConstraintSet plain = ConstraintSet::uncapped(4, 1.0, 3);
  TransmitProfile uniform = uniform_profile(plain);
  for (int k = 0; k < 4; ++k) {
    CHECK(uniform.powers(k) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK((uniform.covariances[static_cast<std::size_t>(k)].mat() -
           Matrix::Identity(3, 3) / 3.0)
              .norm() < 1e-12);
  }

  Vector caps(4);
  caps << 0.1, 1.0, 1.0, 1.0;
  ConstraintSet capped = ConstraintSet::make(4, 1.0, caps, {}, 2);
  TransmitProfile redistributed = uniform_profile(capped);
  CHECK(redistributed.powers(0) == doctest::Approx(0.1).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) {
    CHECK(redistributed.powers(k) == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("benchmark family size follows the closed-dimension count") {
  ConstraintSet m3 = ConstraintSet::uncapped(2, 1.0, 3);
  auto benchmarks = benchmark_set(m3);
  CHECK(benchmarks.size() == 7);
  for (const Benchmark& b : benchmarks) {
    CHECK_NOTHROW(validate_profile(b.profile, m3));
  }
  CHECK(benchmark_set(ConstraintSet::uncapped(2, 1.0, 1)).size() == 1);
  CHECK(benchmark_set(ConstraintSet::uncapped(2, 1.0, 2)).size() == 3);
}

TEST_CASE("randomized policy endpoints") {
  ConstraintSet cs = ConstraintSet::uncapped(2, 1.0, 2);
  RandomizedPolicyState frozen = RandomizedPolicyState::initial(cs, 0.0);
  Rng rng(55);
  RandomizedPolicyState next = randomized_step(frozen, rng);
  for (int k = 0; k < 2; ++k) {
    CHECK((next.covariances[static_cast<std::size_t>(k)].mat() -
           Matrix::Identity(2, 2) / 2.0)
              .norm() < 1e-14);
  }

  RandomizedPolicyState full = RandomizedPolicyState::initial(cs, 1.0);
  Rng step_rng(777);
  Rng replay_rng(777);
  RandomizedPolicyState stepped = randomized_step(full, step_rng);
  for (int k = 0; k < 2; ++k) {
    DensityMatrix expected = sample_unit_trace_psd(2, replay_rng);
    CHECK((stepped.covariances[static_cast<std::size_t>(k)].mat() -
           expected.mat())
              .norm() == 0.0);
  }
}

TEST_CASE("randomized policy long-run average approaches the sampler mean") {
  ConstraintSet cs = ConstraintSet::uncapped(1, 1.0, 2);
  RandomizedPolicyState state = RandomizedPolicyState::initial(cs, 0.9);
  Rng rng(56);
  Matrix acc = Matrix::Zero(2, 2);
  const int steps = 20000;
  for (int t = 0; t < steps; ++t) {
    state = randomized_step(state, rng);
    acc += state.covariances[0].mat();
  }
  acc /= steps;
  CHECK((acc - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("unit-trace sampler statistics") {
  Rng rng(57);
  CHECK(sample_unit_trace_psd(1, rng).mat()(0, 0).real() ==
        doctest::Approx(1.0).epsilon(1e-14));
  Matrix mean = Matrix::Zero(3, 3);
  const int draws = 100000;
  for (int it = 0; it < draws; ++it) {
    DensityMatrix q = sample_unit_trace_psd(3, rng);
    CHECK(std::abs(q.mat().trace().real() - 1.0) < 1e-12);
    mean += q.mat();
  }
  mean /= draws;
  // Unitary invariance puts the mean at I/m; entry deviations are O(1/sqrt(n)).
  CHECK((mean - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() <
        4.0 * 0.2 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("water level allocation closed forms") {
  Vector gains(2);
  gains << 1.0, 0.5;
  Vector x = water_fill(gains, 1.0);
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x(1) == doctest::Approx(0.0));

  Vector equal = Vector::Constant(3, 2.0);
  Vector xe = water_fill(equal, 1.5);
  for (int i = 0; i < 3; ++i) CHECK(xe(i) == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(58);
  for (int it = 0; it < 50; ++it) {
    Vector g(4);
    for (int i = 0; i < 4; ++i) g(i) = rng.uniform(0.05, 3.0);
    const double total = rng.uniform(0.2, 4.0);
    Vector alloc = water_fill(g, total);
    CHECK(alloc.sum() == doctest::Approx(total).epsilon(1e-10));
    CHECK((alloc.array() >= -1e-12).all());
    double value = 0.0;
    for (int i = 0; i < 4; ++i) value += std::log1p(g(i) * alloc(i));
    CHECK(value ==
          doctest::Approx(reference::water_level_capacity(g, total))
              .epsilon(1e-9));
  }
}

TEST_CASE("offline oracle matches water-filling on a single epoch") {
  Rng rng(59);
  for (int it = 0; it < 5; ++it) {
    ConstraintSet cs = ConstraintSet::uncapped(3, 1.0, 2);
    ChannelEpoch epoch = random_epoch(3, 2, 2, rng);
    WaterFillResult wf = water_filling_profile(epoch, cs);
    OracleResult oracle = best_fixed_oracle({epoch}, cs);
    CHECK(oracle.value == doctest::Approx(wf.value).epsilon(1e-6));
    CHECK(oracle.certificate_gap < 1e-5);
    OracleResult inst = instantaneous_optimum(epoch, cs);
    CHECK(inst.value == doctest::Approx(wf.value).epsilon(1e-12));
  }
}

TEST_CASE("offline oracle dominates every benchmark on random streams") {
  Rng rng(60);
  ConstraintSet cs = ConstraintSet::uncapped(2, 1.0, 2);
  std::vector<ChannelEpoch> epochs;
  for (int t = 0; t < 6; ++t) epochs.push_back(random_epoch(2, 2, 2, rng));
  OracleResult oracle = best_fixed_oracle(epochs, cs);
  for (const Benchmark& b : benchmark_set(cs)) {
    double value = 0.0;
    for (const ChannelEpoch& epoch : epochs) value += rate(b.profile, epoch);
    CHECK(oracle.value >= value - 1e-7);
  }

  // Constant channels: the hindsight optimum equals the per-epoch optimum.
  std::vector<ChannelEpoch> constant(4, epochs[0]);
  OracleResult fixed = best_fixed_oracle(constant, cs);
  CHECK(fixed.value / 4.0 ==
        doctest::Approx(instantaneous_optimum(epochs[0], cs).value)
            .epsilon(1e-6));
}
