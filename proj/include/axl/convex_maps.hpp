#pragma once

#include "axl/hermitian.hpp"

namespace axl {

/// Point of the probability simplex: nonnegative weights summing to 1.
struct SimplexPoint {
  explicit SimplexPoint(Vector w);
  Vector weights;
};

/// Power vector respecting per-entry caps and an exact total budget.
struct CappedAllocation {
  CappedAllocation(Vector p, Vector cap_values, double total);
  Vector powers;
  Vector caps;
  double budget;
};

/// Softmax choice map G(y)_k = exp(y_k) / sum_l exp(y_l), computed with a
/// max-shift so arbitrarily large scores stay finite.
SimplexPoint gibbs_map(const Vector& y);

/// Lagrange multiplier lambda solving
///   sum_k caps_k (1 + exp(lambda - y_k))^{-1} = budget
/// by bisection; the left side is strictly decreasing in lambda.
double solve_capped_lambda(const Vector& y, const Vector& caps, double budget);

/// Cap-respecting choice map p_k = caps_k (1 + exp(lambda - y_k))^{-1} with
/// lambda from solve_capped_lambda. Requires 0 < budget <= sum(caps); throws
/// InfeasibleError otherwise. The returned powers meet the budget to within
/// 1e-10 * budget and are interior to (0, caps_k) whenever budget < sum(caps).
CappedAllocation capped_gibbs_map(const Vector& y, const Vector& caps,
                                  double budget);

/// Matrix Gibbs map exp(Y) / tr[exp(Y)], evaluated with a spectral shift for
/// overflow safety. Output is unit-trace PSD.
DensityMatrix matrix_gibbs_map(const HermitianMatrix& y);

/// Gibbs-Shannon entropy sum_k w_k log w_k (note: negative), with the
/// 0 log 0 = 0 convention. Throws InvalidInputError off the simplex.
double gibbs_entropy(const Vector& weights);

/// Capped-allocation entropy sum_k [p_k log p_k + (c_k - p_k) log(c_k - p_k)],
/// continuously extended to the boundary. Throws InvalidInputError outside
/// [0, caps].
double capped_entropy(const Vector& p, const Vector& caps);

/// von Neumann entropy tr[Q log Q] (negative), via the spectrum of Q.
double von_neumann_entropy(const DensityMatrix& q);

/// Convex conjugate of gibbs_entropy: log sum_k exp(y_k), max-shifted.
double log_sum_exp(const Vector& y);

/// Convex conjugate of the von Neumann entropy: log tr[exp(Y)], shifted by the
/// top eigenvalue.
double log_trace_exp(const HermitianMatrix& y);

}  // namespace axl
