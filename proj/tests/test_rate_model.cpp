#include <doctest.h>

#include <cmath>

#include "axl/convex_maps.hpp"
#include "axl/rate_model.hpp"
#include "test_support.hpp"

using namespace axl;
using testing::random_complex;
using testing::random_hermitian;
using testing::random_vector;

namespace {

struct Instance {
  ConstraintSet cs;
  TransmitProfile profile;
  ChannelEpoch epoch;
};

Instance random_instance(int carriers, int rx, int tx, Rng& rng) {
  Instance inst{ConstraintSet::uncapped(carriers, 1.0, tx), {}, {}};
  inst.profile.powers =
      inst.cs.total_power * gibbs_map(random_vector(carriers, rng)).weights;
  for (int k = 0; k < carriers; ++k) {
    inst.profile.covariances.push_back(
        matrix_gibbs_map(HermitianMatrix(random_hermitian(tx, rng))));
    inst.epoch.effective_channels.push_back(random_complex(rx, tx, rng));
  }
  inst.epoch.epoch = 1;
  for (const Matrix& h : inst.epoch.effective_channels) {
    inst.epoch.bound_estimate =
        std::max(inst.epoch.bound_estimate,
                 std::sqrt(HermitianMatrix(h.adjoint() * h).spectral_norm()));
  }
  return inst;
}

}  // namespace

TEST_CASE("rate closed forms") {
  ChannelEpoch epoch;
  epoch.effective_channels.push_back(Matrix::Identity(1, 1));
  TransmitProfile profile;
  profile.powers = Vector::Ones(1);
  profile.covariances.push_back(DensityMatrix::MaxEntropy(1));
  CHECK(rate(profile, epoch) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  ChannelEpoch epoch2;
  epoch2.effective_channels.push_back(Matrix::Identity(2, 2));
  TransmitProfile profile2;
  profile2.powers = Vector::Ones(1);
  profile2.covariances.push_back(DensityMatrix::MaxEntropy(2));
  CHECK(rate(profile2, epoch2) ==
        doctest::Approx(2.0 * std::log(1.5)).epsilon(1e-12));

  profile2.powers(0) = 0.0;
  CHECK(rate(profile2, epoch2) == 0.0);
}

TEST_CASE("rate rejects mismatched dimensions") {
  ChannelEpoch epoch;
  epoch.effective_channels.push_back(Matrix::Identity(2, 2));
  TransmitProfile profile;
  profile.powers = Vector::Ones(1);
  profile.covariances.push_back(DensityMatrix::MaxEntropy(3));
  CHECK_THROWS_AS(rate(profile, epoch), InvalidInputError);
}

TEST_CASE("gradient closed forms") {
  ChannelEpoch epoch;
  epoch.effective_channels.push_back(Matrix::Identity(1, 1));
  TransmitProfile profile;
  profile.powers = Vector::Ones(1);
  profile.covariances.push_back(DensityMatrix::MaxEntropy(1));
  auto grads = gradient_matrices(profile, epoch);
  CHECK(grads[0].mat()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(marginal_utilities(profile, epoch, 1.0)(0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(covariance_gradients(profile, epoch)[0].mat()(0, 0).real() ==
        doctest::Approx(0.5).epsilon(1e-12));

  epoch.effective_channels[0] = Matrix::Zero(1, 1);
  auto zero_grads = gradient_matrices(profile, epoch);
  CHECK(zero_grads[0].mat().norm() == 0.0);
}

TEST_CASE("gradients match central finite differences of the rate") {
  Rng rng(31);
  for (int it = 0; it < 30; ++it) {
    Instance inst = random_instance(2, 2, 2, rng);
    auto grads = gradient_matrices(inst.profile, inst.epoch);
    const double h = 1e-5;

    // Full covariance direction Delta P_k.
    for (int k = 0; k < 2; ++k) {
      HermitianMatrix delta(0.5 * random_hermitian(2, rng, 0.2));
      auto perturb = [&](double sign) {
        TransmitProfile p = inst.profile;
        Matrix shifted = p.powers(k) * p.covariances[static_cast<std::size_t>(k)].mat() +
                         sign * h * delta.mat();
        EigenSystem es = eigensystem(HermitianMatrix(shifted));
        if (es.values.minCoeff() < 1e-8) return std::nan("");
        const double tr = shifted.trace().real();
        p.powers(k) = tr;
        p.covariances[static_cast<std::size_t>(k)] =
            DensityMatrix(HermitianMatrix(shifted / tr));
        return rate(p, inst.epoch);
      };
      const double up = perturb(1.0);
      const double down = perturb(-1.0);
      if (std::isnan(up) || std::isnan(down)) continue;
      const double fd = (up - down) / (2.0 * h);
      const double analytic =
          (grads[static_cast<std::size_t>(k)].mat() * delta.mat())
              .trace()
              .real();
      CHECK(std::abs(fd - analytic) <=
            1e-4 * std::max(1.0, std::abs(analytic)));
    }

    // Marginal utilities: power direction on one carrier.
    Vector v = marginal_utilities(inst.profile, inst.epoch,
                                  inst.cs.total_power);
    for (int k = 0; k < 2; ++k) {
      auto at_power = [&](double sign) {
        TransmitProfile p = inst.profile;
        p.powers(k) += sign * h * inst.cs.total_power;
        return rate(p, inst.epoch);
      };
      const double fd = (at_power(1.0) - at_power(-1.0)) / (2.0 * h);
      CHECK(std::abs(fd - v(k)) <= 1e-4 * std::max(1.0, std::abs(v(k))));
    }

    // Covariance gradients: trace-zero direction at fixed power.
    auto cov_grads = covariance_gradients(inst.profile, inst.epoch);
    for (int k = 0; k < 2; ++k) {
      Matrix z = random_hermitian(2, rng, 0.2);
      z -= (z.trace() / 2.0) * Matrix::Identity(2, 2);
      auto at_cov = [&](double sign) {
        TransmitProfile p = inst.profile;
        Matrix q = p.covariances[static_cast<std::size_t>(k)].mat() +
                   sign * h * z;
        EigenSystem es = eigensystem(HermitianMatrix(q));
        if (es.values.minCoeff() < 1e-8) return std::nan("");
        p.covariances[static_cast<std::size_t>(k)] =
            DensityMatrix(HermitianMatrix(q));
        return rate(p, inst.epoch);
      };
      const double up = at_cov(1.0);
      const double down = at_cov(-1.0);
      if (std::isnan(up) || std::isnan(down)) continue;
      const double fd = (up - down) / (2.0 * h);
      const double analytic =
          (cov_grads[static_cast<std::size_t>(k)].mat() * z).trace().real();
      CHECK(std::abs(fd - analytic) <=
            1e-4 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST_CASE("gradient norms respect the channel bound") {
  Rng rng(32);
  for (int it = 0; it < 20; ++it) {
    Instance inst = random_instance(3, 2, 2, rng);
    auto grads = gradient_matrices(inst.profile, inst.epoch);
    for (const HermitianMatrix& m : grads) {
      EigenSystem es = eigensystem(m);
      CHECK(es.values.minCoeff() > -1e-12);
      CHECK(m.spectral_norm() <=
            inst.epoch.bound_estimate * inst.epoch.bound_estimate + 1e-9);
    }
  }
}

TEST_CASE("rate is concave and satisfies the first-order upper bound") {
  Rng rng(33);
  for (int it = 0; it < 20; ++it) {
    Instance a = random_instance(2, 2, 2, rng);
    Instance b = random_instance(2, 2, 2, rng);
    b.epoch = a.epoch;
    const double theta = rng.uniform(0.1, 0.9);
    TransmitProfile mix;
    mix.powers = theta * a.profile.powers + (1.0 - theta) * b.profile.powers;
    for (int k = 0; k < 2; ++k) {
      Matrix q = theta * a.profile.powers(k) *
                     a.profile.covariances[static_cast<std::size_t>(k)].mat() +
                 (1.0 - theta) * b.profile.powers(k) *
                     b.profile.covariances[static_cast<std::size_t>(k)].mat();
      mix.covariances.push_back(
          DensityMatrix(HermitianMatrix(q / mix.powers(k))));
    }
    const double lhs = rate(mix, a.epoch);
    const double rhs = theta * rate(a.profile, a.epoch) +
                       (1.0 - theta) * rate(b.profile, a.epoch);
    CHECK(lhs >= rhs - 1e-9);

    // First-order expansion bounds the improvement.
    auto grads = gradient_matrices(a.profile, a.epoch);
    double linear = 0.0;
    for (int k = 0; k < 2; ++k) {
      Matrix diff =
          b.profile.powers(k) *
              b.profile.covariances[static_cast<std::size_t>(k)].mat() -
          a.profile.powers(k) *
              a.profile.covariances[static_cast<std::size_t>(k)].mat();
      linear += (grads[static_cast<std::size_t>(k)].mat() * diff)
                    .trace()
                    .real();
    }
    CHECK(rate(b.profile, a.epoch) - rate(a.profile, a.epoch) <=
          linear + 1e-9);
  }
}

TEST_CASE("rate never decreases when a carrier gets more power") {
  Rng rng(34);
  for (int it = 0; it < 20; ++it) {
    Instance inst = random_instance(3, 2, 2, rng);
    const double before = rate(inst.profile, inst.epoch);
    TransmitProfile boosted = inst.profile;
    boosted.powers(static_cast<int>(rng.next_u64() % 3)) += 0.25;
    CHECK(rate(boosted, inst.epoch) >= before - 1e-12);
  }
}

TEST_CASE("null-shaping reduction removes the forbidden directions exactly") {
  Rng rng(35);
  Matrix h = random_complex(3, 3, rng);
  CHECK((reduce_by_null_shaping(h, Matrix::Identity(3, 3)) - h).norm() == 0.0);

  Matrix u = random_complex(3, 1, rng);
  Matrix n = nullspace_basis(u);
  ConstraintSet cs = ConstraintSet::make(2, 1.0, Vector::Ones(2), {n, n}, 3);
  TransmitProfile profile;
  profile.powers = Vector::Constant(2, 0.5);
  profile.covariances.assign(2, DensityMatrix::MaxEntropy(2));
  for (const Matrix& lifted : lift_profile(profile, cs)) {
    CHECK((u.adjoint() * lifted).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(reduce_by_null_shaping(h, n).cols() == 2);
  CHECK_THROWS_AS(reduce_by_null_shaping(random_complex(3, 2, rng), n),
                  InvalidInputError);
}

TEST_CASE("profile validation enforces the feasible set") {
  ConstraintSet cs = ConstraintSet::make(2, 1.0, Vector::Constant(2, 0.8), {}, 2);
  TransmitProfile good;
  good.powers = Vector::Constant(2, 0.5);
  good.covariances.assign(2, DensityMatrix::MaxEntropy(2));
  CHECK_NOTHROW(validate_profile(good, cs));

  TransmitProfile over_cap = good;
  over_cap.powers << 0.9, 0.1;
  CHECK_THROWS_AS(validate_profile(over_cap, cs), InvalidInputError);

  TransmitProfile off_budget = good;
  off_budget.powers << 0.4, 0.4;
  CHECK_THROWS_AS(validate_profile(off_budget, cs), InvalidInputError);

  CHECK_THROWS_AS(ConstraintSet::make(2, 2.0, Vector::Constant(2, 0.8), {}, 2),
                  InfeasibleError);
}
