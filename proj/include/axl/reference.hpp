#pragma once

#include <functional>
#include <vector>

#include "axl/common.hpp"

namespace axl::reference {

/// Reference solvers for cross-checking the closed-form maps. Everything in
/// this namespace deliberately avoids the production code paths: the
/// maximizers run projected-gradient ascent on the defining concave programs,
/// the water level comes from bisection instead of the active-set rule, and
/// the matrix exponential is a truncated power series.

/// Truncated power-series matrix exponential, sum_{k<=terms} A^k / k!.
Matrix taylor_expm(const Matrix& a, int terms = 30);

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& x);

/// Euclidean projection onto {0 <= p <= caps, sum p = budget}.
Vector project_capped_simplex(const Vector& x, const Vector& caps,
                              double budget);

/// argmax <y, q> - sum_k q_k log q_k over the simplex.
Vector simplex_entropy_maximizer(const Vector& y);

/// argmax <y, p> - sum_k [p_k log p_k + (c_k - p_k) log(c_k - p_k)] over
/// {0 <= p <= caps, sum p = budget}.
Vector capped_entropy_maximizer(const Vector& y, const Vector& caps,
                                double budget);

/// argmax tr[Y Q] - tr[Q log Q] over 2x2 density matrices, via the Bloch
/// parameterization Q = (I + r . sigma)/2 with a grid start and
/// projected-gradient refinement.
Matrix bloch_entropy_maximizer(const Matrix& y);

/// Same program for any dimension: projected-gradient ascent directly in the
/// spectrahedron (eigenvalue projection onto the simplex).
Matrix spectrahedron_entropy_maximizer(const Matrix& y);

/// Water-filling capacity sum_i log(1 + g_i x_i) at the optimum, with the
/// water level found by bisection.
double water_level_capacity(const Vector& gains, double total);

double bessel_j0(double x);

/// Kolmogorov-Smirnov statistic of the samples against a CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

struct MapVerification {
  double gibbs_deviation = 0.0;
  double capped_deviation = 0.0;
  double matrix_deviation = 0.0;
  double lambda_residual = 0.0;  // |sum p - P| / P, worst case
  int instances = 0;
};

/// Compare the three choice maps against their concave-program maximizers on
/// random instances (K in 2..5, m in 2..3); returns the worst deviations.
MapVerification verify_maps(int instances, std::uint64_t seed);

}  // namespace axl::reference
