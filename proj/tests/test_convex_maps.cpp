#include <doctest.h>

#include <cmath>

#include "axl/convex_maps.hpp"
#include "axl/reference.hpp"
#include "test_support.hpp"

using namespace axl;
using testing::random_hermitian;
using testing::random_vector;

TEST_CASE("gibbs map of zero scores is uniform") {
  Vector q = gibbs_map(Vector::Zero(4)).weights;
  for (int k = 0; k < 4; ++k) CHECK(q(k) == doctest::Approx(0.25));
}

TEST_CASE("two-point closed form") {
  Vector y(2);
  y << std::log(2.0), 0.0;
  Vector q = gibbs_map(y).weights;
  CHECK(q(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(q(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gibbs map solves the entropy-regularized program") {
  Rng rng(21);
  for (int it = 0; it < 25; ++it) {
    Vector y = random_vector(5, rng, 2.0);
    Vector q = gibbs_map(y).weights;
    Vector q_ref = reference::simplex_entropy_maximizer(y);
    CHECK((q - q_ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("gibbs map ignores constant score shifts and survives huge scores") {
  Rng rng(22);
  for (int it = 0; it < 200; ++it) {
    Vector y = random_vector(4, rng, 3.0);
    Vector shifted = y.array() + rng.uniform(-50.0, 50.0);
    CHECK((gibbs_map(y).weights - gibbs_map(shifted).weights)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  Vector big(3);
  big << 1e6, 1e6 - 1.0, 0.0;
  Vector q = gibbs_map(big).weights;
  CHECK(q.allFinite());
  CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gibbs map is 1-Lipschitz from max-norm to L1") {
  Rng rng(23);
  for (int it = 0; it < 1000; ++it) {
    Vector y = random_vector(5, rng, 2.0);
    Vector y2 = y + random_vector(5, rng, 0.5);
    const double lhs = (gibbs_map(y).weights - gibbs_map(y2).weights)
                           .cwiseAbs()
                           .sum();
    CHECK(lhs <= (y - y2).cwiseAbs().maxCoeff() + 1e-12);
  }
}

TEST_CASE("capped map symmetric instance") {
  Vector y = Vector::Zero(2);
  Vector caps = Vector::Ones(2);
  CHECK(std::abs(solve_capped_lambda(y, caps, 1.0)) < 1e-9);
  CappedAllocation a = capped_gibbs_map(y, caps, 1.0);
  CHECK(a.powers(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.powers(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("capped map quadratic closed form") {
  Vector y(2);
  y << std::log(3.0), 0.0;
  Vector caps = Vector::Ones(2);
  const double lam = solve_capped_lambda(y, caps, 1.0);
  CHECK(std::exp(lam) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CappedAllocation a = capped_gibbs_map(y, caps, 1.0);
  CHECK(a.powers(0) == doctest::Approx(0.6339746).epsilon(1e-6));
  CHECK(a.powers(1) == doctest::Approx(0.3660254).epsilon(1e-6));
}

TEST_CASE("capped map solves the modified-entropy program") {
  Rng rng(24);
  for (int it = 0; it < 25; ++it) {
    const int k = 3 + static_cast<int>(rng.next_u64() % 3);
    Vector y = random_vector(k, rng, 2.0);
    Vector caps(k);
    for (int i = 0; i < k; ++i) caps(i) = rng.uniform(0.5, 2.0);
    const double budget = rng.uniform(0.3, 0.9) * caps.sum();
    CappedAllocation a = capped_gibbs_map(y, caps, budget);
    Vector p_ref = reference::capped_entropy_maximizer(y, caps, budget);
    CHECK((a.powers - p_ref).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(a.powers.sum() - budget) < 1e-10 * budget);
    CHECK((a.powers.array() > 0.0).all());
    CHECK(((caps - a.powers).array() > 0.0).all());
  }
}

TEST_CASE("lambda equation residual and monotonicity") {
  Rng rng(25);
  for (int it = 0; it < 200; ++it) {
    const int k = 2 + static_cast<int>(rng.next_u64() % 4);
    Vector y = random_vector(k, rng, 3.0);
    Vector caps(k);
    for (int i = 0; i < k; ++i) caps(i) = rng.uniform(0.2, 3.0);
    const double budget = rng.uniform(0.2, 0.95) * caps.sum();
    const double lam = solve_capped_lambda(y, caps, budget);
    auto mass = [&](double l) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += caps(i) / (1.0 + std::exp(l - y(i)));
      return s;
    };
    CHECK(std::abs(mass(lam) - budget) < 1e-10 * budget);
    CHECK(mass(lam - 0.5) > mass(lam + 0.5));
  }
}

TEST_CASE("capped map edge cases") {
  Vector caps = Vector::Ones(2);
  CHECK_THROWS_AS(capped_gibbs_map(Vector::Zero(2), caps, 2.5),
                  InfeasibleError);
  CappedAllocation saturated = capped_gibbs_map(Vector::Zero(2), caps, 2.0);
  CHECK(saturated.powers(0) == doctest::Approx(1.0));
}

TEST_CASE("matrix gibbs map: maximal entropy and diagonal reduction") {
  DensityMatrix q = matrix_gibbs_map(HermitianMatrix::Zero(3));
  CHECK((q.mat() - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() <
        1e-14);
  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = std::log(2.0);
  DensityMatrix d = matrix_gibbs_map(HermitianMatrix(y));
  CHECK(d.mat()(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d.mat()(1, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("matrix gibbs map solves the von Neumann program") {
  Rng rng(26);
  for (int it = 0; it < 25; ++it) {
    HermitianMatrix y(random_hermitian(2, rng, 1.5));
    Matrix q = matrix_gibbs_map(y).mat();
    Matrix q_ref = reference::bloch_entropy_maximizer(y.mat());
    CHECK((q - q_ref).cwiseAbs().maxCoeff() < 1e-6);
  }
  // The direct spectrahedron solver covers the 3x3 case.
  for (int it = 0; it < 10; ++it) {
    HermitianMatrix y(random_hermitian(3, rng, 1.5));
    Matrix q = matrix_gibbs_map(y).mat();
    Matrix q_ref = reference::spectrahedron_entropy_maximizer(y.mat());
    CHECK((q - q_ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("matrix gibbs map shift invariance and overflow safety") {
  Rng rng(27);
  for (int it = 0; it < 50; ++it) {
    Matrix y = random_hermitian(3, rng, 2.0);
    const double c = rng.uniform(-100.0, 100.0);
    Matrix q1 = matrix_gibbs_map(HermitianMatrix(y)).mat();
    Matrix q2 =
        matrix_gibbs_map(HermitianMatrix(y + c * Matrix::Identity(3, 3)))
            .mat();
    CHECK((q1 - q2).cwiseAbs().maxCoeff() < 1e-12);
  }
  Matrix huge = 1e4 * Matrix::Identity(2, 2);
  huge(1, 1) = 9.9e3;
  DensityMatrix q = matrix_gibbs_map(HermitianMatrix(huge));
  CHECK(q.mat().allFinite());
}

TEST_CASE("matrix gibbs map is 1-Lipschitz from spectral to trace norm") {
  Rng rng(28);
  for (int it = 0; it < 500; ++it) {
    const int m = it % 2 == 0 ? 2 : 3;
    Matrix y = random_hermitian(m, rng, 2.0);
    Matrix y2 = y + random_hermitian(m, rng, 0.4);
    Matrix diff = matrix_gibbs_map(HermitianMatrix(y)).mat() -
                  matrix_gibbs_map(HermitianMatrix(y2)).mat();
    EigenSystem d = eigensystem(HermitianMatrix(diff));
    const double trace_norm = d.values.cwiseAbs().sum();
    CHECK(trace_norm <=
          HermitianMatrix(y - y2).spectral_norm() + 1e-12);
  }
}

TEST_CASE("entropy values at the canonical points") {
  CHECK(gibbs_entropy(Vector::Constant(4, 0.25)) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-12));
  DensityMatrix iso = DensityMatrix::MaxEntropy(3);
  CHECK(von_neumann_entropy(iso) ==
        doctest::Approx(-std::log(3.0)).epsilon(1e-12));
  CHECK(log_trace_exp(HermitianMatrix::Zero(3)) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("Fenchel-Young equality for both conjugate pairs") {
  Rng rng(29);
  for (int it = 0; it < 50; ++it) {
    Vector y = random_vector(5, rng, 2.0);
    SimplexPoint g = gibbs_map(y);
    CHECK(std::abs(log_sum_exp(y) -
                   (y.dot(g.weights) - gibbs_entropy(g.weights))) < 1e-9);

    HermitianMatrix ym(random_hermitian(3, rng, 1.5));
    DensityMatrix q = matrix_gibbs_map(ym);
    const double pairing = (ym.mat() * q.mat()).trace().real();
    CHECK(std::abs(log_trace_exp(ym) - (pairing - von_neumann_entropy(q))) <
          1e-9);
  }
}

TEST_CASE("entropies reject domain violations") {
  Vector negative(2);
  negative << 1.2, -0.2;
  CHECK_THROWS_AS(gibbs_entropy(negative), InvalidInputError);
  Vector not_normalized = Vector::Constant(3, 0.5);
  CHECK_THROWS_AS(gibbs_entropy(not_normalized), InvalidInputError);
  Vector p(2), caps(2);
  p << 0.5, 1.5;
  caps << 1.0, 1.0;
  CHECK_THROWS_AS(capped_entropy(p, caps), InvalidInputError);
}

TEST_CASE("boundary convention for the capped entropy") {
  Vector p(2), caps(2);
  p << 0.0, 1.0;
  caps << 1.0, 1.0;
  CHECK(capped_entropy(p, caps) == doctest::Approx(0.0));
}
