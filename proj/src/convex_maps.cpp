#include "axl/convex_maps.hpp"

#include <algorithm>
#include <cmath>

namespace axl {

namespace {

constexpr double kSimplexTol = 1e-10;
constexpr double kBudgetTol = 1e-9;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

SimplexPoint::SimplexPoint(Vector w) : weights(std::move(w)) {
  if (weights.size() == 0) {
    throw InvalidInputError("SimplexPoint: empty weight vector");
  }
  if ((weights.array() < -kSimplexTol).any()) {
    throw InvalidInputError("SimplexPoint: negative weight");
  }
  if (std::abs(weights.sum() - 1.0) > kSimplexTol) {
    throw InvalidInputError("SimplexPoint: weights do not sum to 1");
  }
}

CappedAllocation::CappedAllocation(Vector p, Vector cap_values, double total)
    : powers(std::move(p)), caps(std::move(cap_values)), budget(total) {
  if (powers.size() != caps.size()) {
    throw InvalidInputError("CappedAllocation: size mismatch");
  }
  if (budget <= 0.0 || budget > caps.sum() * (1.0 + 1e-12)) {
    throw InfeasibleError("CappedAllocation: budget outside (0, sum(caps)]");
  }
  const double tol = kBudgetTol * std::max(1.0, budget);
  if ((powers.array() < -tol).any() ||
      ((powers - caps).array() > tol).any()) {
    throw InvalidInputError("CappedAllocation: power outside [0, cap]");
  }
  if (std::abs(powers.sum() - budget) > tol) {
    throw InvalidInputError("CappedAllocation: powers do not sum to budget");
  }
}

SimplexPoint gibbs_map(const Vector& y) {
  if (y.size() == 0 || !y.allFinite()) {
    throw InvalidInputError("gibbs_map: scores must be finite and non-empty");
  }
  Vector shifted = (y.array() - y.maxCoeff()).exp();
  return SimplexPoint(shifted / shifted.sum());
}

double solve_capped_lambda(const Vector& y, const Vector& caps, double budget) {
  if (y.size() != caps.size() || y.size() == 0) {
    throw InvalidInputError("solve_capped_lambda: size mismatch");
  }
  if (!y.allFinite() || !caps.allFinite() || (caps.array() <= 0.0).any()) {
    throw InvalidInputError("solve_capped_lambda: bad scores or caps");
  }
  const double cap_sum = caps.sum();
  if (budget <= 0.0 || budget > cap_sum) {
    throw InfeasibleError("solve_capped_lambda: infeasible budget");
  }

  auto residual = [&](double lam) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      s += caps(k) / (1.0 + std::exp(lam - y(k)));
    }
    return s - budget;
  };

  // residual is strictly decreasing; expand the bracket until it straddles 0.
  double lo = y.minCoeff() - std::log(cap_sum / budget);
  double hi = y.maxCoeff() + std::log(std::max(cap_sum / budget - 1.0, 1e-16)) + 1.0;
  if (lo > hi) std::swap(lo, hi);
  double step = 1.0;
  while (residual(lo) < 0.0) {
    lo -= step;
    step *= 2.0;
    if (step > 1e18) throw InvalidInputError("solve_capped_lambda: bracket failure");
  }
  step = 1.0;
  while (residual(hi) > 0.0) {
    hi += step;
    step *= 2.0;
    if (step > 1e18) throw InvalidInputError("solve_capped_lambda: bracket failure");
  }

  const double tol = 1e-12 * std::max(1.0, budget);
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) <= tol) break;
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return mid;
}

CappedAllocation capped_gibbs_map(const Vector& y, const Vector& caps,
                                  double budget) {
  const double cap_sum = caps.sum();
  if (budget > cap_sum) {
    throw InfeasibleError("capped_gibbs_map: budget exceeds sum of caps");
  }
  // Saturated budget: the only feasible point is the cap vector itself.
  if (budget >= cap_sum * (1.0 - 1e-15)) {
    return CappedAllocation(caps * (budget / cap_sum), caps, budget);
  }
  const double lam = solve_capped_lambda(y, caps, budget);
  Vector p(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    p(k) = caps(k) / (1.0 + std::exp(lam - y(k)));
  }
  return CappedAllocation(std::move(p), caps, budget);
}

DensityMatrix matrix_gibbs_map(const HermitianMatrix& y) {
  EigenSystem es = eigensystem(y);
  Vector w = (es.values.array() - es.values.maxCoeff()).exp();
  w /= w.sum();
  Matrix q = es.vectors * w.asDiagonal() * es.vectors.adjoint();
  return unit_trace_psd_unchecked(HermitianMatrix(std::move(q)));
}

double gibbs_entropy(const Vector& weights) {
  if ((weights.array() < -kSimplexTol).any() ||
      std::abs(weights.sum() - 1.0) > kSimplexTol) {
    throw InvalidInputError("gibbs_entropy: argument not on the simplex");
  }
  double h = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) h += xlogx(weights(k));
  return h;
}

double capped_entropy(const Vector& p, const Vector& caps) {
  if (p.size() != caps.size()) {
    throw InvalidInputError("capped_entropy: size mismatch");
  }
  const double tol = kBudgetTol * std::max(1.0, caps.maxCoeff());
  if ((p.array() < -tol).any() || ((p - caps).array() > tol).any()) {
    throw InvalidInputError("capped_entropy: power outside [0, caps]");
  }
  double h = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    h += xlogx(std::max(p(k), 0.0)) + xlogx(std::max(caps(k) - p(k), 0.0));
  }
  return h;
}

double von_neumann_entropy(const DensityMatrix& q) {
  EigenSystem es = eigensystem(q.hermitian());
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    h += xlogx(std::max(es.values(i), 0.0));
  }
  return h;
}

double log_sum_exp(const Vector& y) {
  if (y.size() == 0 || !y.allFinite()) {
    throw InvalidInputError("log_sum_exp: scores must be finite and non-empty");
  }
  const double m = y.maxCoeff();
  return m + std::log((y.array() - m).exp().sum());
}

double log_trace_exp(const HermitianMatrix& y) {
  EigenSystem es = eigensystem(y);
  const double m = es.values.maxCoeff();
  return m + std::log((es.values.array() - m).exp().sum());
}

}  // namespace axl
