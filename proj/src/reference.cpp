#include "axl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "axl/convex_maps.hpp"

namespace axl::reference {

namespace {

double entropy_term(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Projected-gradient ascent along the arc project(x + alpha d), where d may
/// carry a diagonal metric. Each iteration sweeps a geometric range of step
/// sizes and keeps the best point, so a failed probe never aborts the climb;
/// the sweep restarts from a larger base after a stall.
template <typename Value, typename Objective, typename Direction,
          typename Project, typename Distance>
Value pg_ascent(Value x, const Objective& f, const Direction& direction,
                const Project& project, const Distance& distance,
                int max_iters) {
  double fx = f(x);
  double hint = 1.0;
  int stalls = 0;
  int tiny_moves = 0;
  for (int it = 0; it < max_iters; ++it) {
    Value d = direction(x);
    double alpha = hint * 8.0;
    double best_f = fx;
    Value best_x = x;
    double best_alpha = 0.0;
    int after_best = 0;
    for (int bt = 0; bt < 160; ++bt) {
      Value candidate = project(x + alpha * d);
      const double fc = f(candidate);
      if (fc > best_f) {
        best_f = fc;
        best_x = std::move(candidate);
        best_alpha = alpha;
        after_best = 0;
      } else if (best_alpha > 0.0 && ++after_best >= 3) {
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-280) break;
    }
    if (best_alpha == 0.0) {
      if (++stalls >= 3) break;
      hint = std::min(hint * 4096.0, 1e12);
      continue;
    }
    stalls = 0;
    hint = best_alpha;
    const double moved = distance(best_x, x);
    x = std::move(best_x);
    fx = best_f;
    if (moved < 1e-14) {
      if (++tiny_moves >= 3) break;
    } else {
      tiny_moves = 0;
    }
  }
  return x;
}

double vec_distance(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Damped Newton ascent on the interior of {p > 0, p < caps, sum p = budget}
/// after eliminating the last coordinate. The entropy keeps the maximizer
/// strictly interior, so this converges quadratically from the projected-
/// gradient point however ill-conditioned the instance. Pass caps with all
/// entries +inf-like (> budget) and budget 1 for the plain simplex.
Vector newton_polish(const Vector& y, const Vector& caps, double budget,
                     Vector p, const std::function<double(const Vector&)>& f) {
  const Eigen::Index n = y.size();
  if (n == 1) return Vector::Constant(1, budget);
  // Nudge strictly inside the box.
  Vector interior = caps * (budget / caps.sum());
  p = (1.0 - 1e-9) * p + 1e-9 * interior;

  auto partial = [&](double pk, double ck, double yk) {
    return yk - std::log(pk) + (ck > budget * 1e12
                                    ? 0.0
                                    : std::log(std::max(ck - pk, 1e-300)));
  };
  auto curvature = [&](double pk, double ck) {
    double h = 1.0 / pk;
    if (ck <= budget * 1e12) h += 1.0 / std::max(ck - pk, 1e-300);
    return h;
  };

  double fp = f(p);
  for (int it = 0; it < 200; ++it) {
    const double last = partial(p(n - 1), caps(n - 1), y(n - 1));
    Vector g(n - 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Constant(
        n - 1, n - 1, curvature(p(n - 1), caps(n - 1)));
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      g(i) = partial(p(i), caps(i), y(i)) - last;
      h(i, i) += curvature(p(i), caps(i));
    }
    if (g.cwiseAbs().maxCoeff() < 1e-13) break;
    Vector du = h.ldlt().solve(g);
    Vector dp(n);
    dp.head(n - 1) = du;
    dp(n - 1) = -du.sum();
    double alpha = 1.0;
    bool stepped = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector candidate = p + alpha * dp;
      const bool inside = (candidate.array() > 0.0).all() &&
                          ((caps - candidate).array() > 0.0).all();
      if (inside) {
        const double fc = f(candidate);
        if (fc >= fp) {
          p = std::move(candidate);
          fp = fc;
          stepped = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!stepped) break;
  }
  return p;
}

}  // namespace

Matrix taylor_expm(const Matrix& a, int terms) {
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  for (int k = 1; k <= terms; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  return result;
}

Vector project_simplex(const Vector& x) {
  const Eigen::Index n = x.size();
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  int active = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate =
        (cumulative - 1.0) / static_cast<double>(j + 1);
    if (candidate < sorted[static_cast<std::size_t>(j)]) {
      tau = candidate;
      active = static_cast<int>(j) + 1;
    }
  }
  (void)active;
  return (x.array() - tau).max(0.0);
}

Vector project_capped_simplex(const Vector& x, const Vector& caps,
                              double budget) {
  auto mass = [&](double tau) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      s += std::clamp(x(k) - tau, 0.0, caps(k));
    }
    return s;
  };
  double lo = (x - caps).minCoeff() - 1.0;
  double hi = x.maxCoeff() + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tau = 0.5 * (lo + hi);
  Vector p(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    p(k) = std::clamp(x(k) - tau, 0.0, caps(k));
  }
  return p;
}

Vector simplex_entropy_maximizer(const Vector& y) {
  const Eigen::Index n = y.size();
  auto objective = [&](const Vector& q) {
    double f = y.dot(q);
    for (Eigen::Index k = 0; k < n; ++k) f -= entropy_term(q(k));
    return f;
  };
  auto gradient = [&](const Vector& q) {
    Vector g(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      g(k) = y(k) - (std::log(std::max(q(k), 1e-300)) + 1.0);
    }
    return g;
  };
  Vector q0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector q = pg_ascent(
      q0, objective, gradient,
      [](const Vector& v) { return project_simplex(v); }, vec_distance, 2000);
  return newton_polish(y, Vector::Constant(n, 1e16), 1.0, std::move(q),
                       objective);
}

Vector capped_entropy_maximizer(const Vector& y, const Vector& caps,
                                double budget) {
  const Eigen::Index n = y.size();
  auto objective = [&](const Vector& p) {
    double f = y.dot(p);
    for (Eigen::Index k = 0; k < n; ++k) {
      f -= entropy_term(p(k)) + entropy_term(caps(k) - p(k));
    }
    return f;
  };
  auto gradient = [&](const Vector& p) {
    Vector g(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double inner = std::max(p(k), 1e-300);
      const double slack = std::max(caps(k) - p(k), 1e-300);
      g(k) = y(k) - std::log(inner) + std::log(slack);
    }
    return g;
  };
  Vector p0 = caps * (budget / caps.sum());
  Vector p = pg_ascent(
      p0, objective, gradient,
      [&](const Vector& v) { return project_capped_simplex(v, caps, budget); },
      vec_distance, 2000);
  return newton_polish(y, caps, budget, std::move(p), objective);
}

Matrix bloch_entropy_maximizer(const Matrix& y) {
  if (y.rows() != 2 || y.cols() != 2) {
    throw InvalidInputError("bloch_entropy_maximizer: 2x2 only");
  }
  // Pauli coordinates of the Hermitian score matrix.
  const double w1 = 2.0 * y(0, 1).real();
  const double w2 = -2.0 * y(0, 1).imag();
  const double w3 = (y(0, 0) - y(1, 1)).real();
  const Eigen::Vector3d w(w1, w2, w3);

  auto entropy = [](double rho) {
    const double a = (1.0 + rho) / 2.0;
    const double b = (1.0 - rho) / 2.0;
    return entropy_term(a) + entropy_term(b);
  };
  auto objective = [&](const Eigen::Vector3d& r) {
    return 0.5 * w.dot(r) - entropy(std::min(r.norm(), 1.0 - 1e-15));
  };
  auto gradient = [&](const Eigen::Vector3d& r) {
    const double rho = r.norm();
    Eigen::Vector3d g = 0.5 * w;
    if (rho > 1e-14) {
      const double h_prime =
          0.5 * std::log((1.0 + rho) / std::max(1.0 - rho, 1e-300));
      g -= h_prime * (r / rho);
    }
    return g;
  };
  auto project = [](const Eigen::Vector3d& r) {
    const double rho = r.norm();
    constexpr double kMax = 1.0 - 1e-12;
    return rho > kMax ? Eigen::Vector3d(r * (kMax / rho)) : r;
  };

  // Coarse grid start, then projected-gradient refinement.
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_val = objective(best);
  const int steps = 24;
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      for (int k = -steps; k <= steps; ++k) {
        Eigen::Vector3d r(static_cast<double>(i) / steps,
                          static_cast<double>(j) / steps,
                          static_cast<double>(k) / steps);
        if (r.norm() >= 1.0) continue;
        const double val = objective(r);
        if (val > best_val) {
          best_val = val;
          best = r;
        }
      }
    }
  }
  best = pg_ascent(
      best, objective, gradient, project,
      [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
        return (a - b).cwiseAbs().maxCoeff();
      },
      20000);

  Matrix q(2, 2);
  q(0, 0) = 0.5 * (1.0 + best(2));
  q(1, 1) = 0.5 * (1.0 - best(2));
  q(0, 1) = 0.5 * Complex(best(0), -best(1));
  q(1, 0) = 0.5 * Complex(best(0), best(1));
  return q;
}

Matrix spectrahedron_entropy_maximizer(const Matrix& y) {
  const Eigen::Index m = y.rows();
  auto project = [m](const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.adjoint()));
    Vector lam = project_simplex(es.eigenvalues());
    return Matrix(es.eigenvectors() * lam.asDiagonal() *
                  es.eigenvectors().adjoint());
  };
  auto objective = [&](const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    double f = (y * q).trace().real();
    for (Eigen::Index i = 0; i < m; ++i) {
      f -= entropy_term(std::max(es.eigenvalues()(i), 0.0));
    }
    return f;
  };
  auto gradient = [&](const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    Vector log_lam(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      log_lam(i) = std::log(std::max(es.eigenvalues()(i), 1e-300));
    }
    Matrix log_q = es.eigenvectors() * log_lam.asDiagonal() *
                   es.eigenvectors().adjoint();
    return Matrix(y - log_q - Matrix::Identity(m, m));
  };
  Matrix q0 = Matrix::Identity(m, m) / static_cast<double>(m);
  return pg_ascent(
      q0, objective, gradient, project,
      [](const Matrix& a, const Matrix& b) {
        return (a - b).cwiseAbs().maxCoeff();
      },
      20000);
}

double water_level_capacity(const Vector& gains, double total) {
  auto poured = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < gains.size(); ++i) {
      if (gains(i) > 0.0) s += std::max(0.0, mu - 1.0 / gains(i));
    }
    return s;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (poured(hi) < total) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (poured(mid) < total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mu = 0.5 * (lo + hi);
  double capacity = 0.0;
  for (Eigen::Index i = 0; i < gains.size(); ++i) {
    if (gains(i) > 0.0 && mu > 1.0 / gains(i)) {
      capacity += std::log(mu * gains(i));
    }
  }
  return capacity;
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

MapVerification verify_maps(int instances, std::uint64_t seed) {
  Rng rng(seed);
  MapVerification out;
  out.instances = instances;
  for (int it = 0; it < instances; ++it) {
    // Simplex map, K in 2..5.
    {
      const int k = 2 + static_cast<int>(rng.next_u64() % 4);
      Vector y(k);
      for (int i = 0; i < k; ++i) y(i) = 2.0 * rng.normal();
      Vector q = gibbs_map(y).weights;
      Vector q_ref = simplex_entropy_maximizer(y);
      out.gibbs_deviation =
          std::max(out.gibbs_deviation, (q - q_ref).cwiseAbs().maxCoeff());
    }
    // Capped map, K in 2..5.
    {
      const int k = 2 + static_cast<int>(rng.next_u64() % 4);
      Vector y(k), caps(k);
      for (int i = 0; i < k; ++i) {
        y(i) = 2.0 * rng.normal();
        caps(i) = rng.uniform(0.5, 2.0);
      }
      const double budget = rng.uniform(0.3, 0.9) * caps.sum();
      CappedAllocation alloc = capped_gibbs_map(y, caps, budget);
      Vector p_ref = capped_entropy_maximizer(y, caps, budget);
      out.capped_deviation = std::max(
          out.capped_deviation, (alloc.powers - p_ref).cwiseAbs().maxCoeff());
      out.lambda_residual =
          std::max(out.lambda_residual,
                   std::abs(alloc.powers.sum() - budget) / budget);
    }
    // Matrix map, m in 2..3: Bloch oracle for m = 2, direct spectrahedron
    // ascent for m = 3.
    {
      const int m = 2 + static_cast<int>(rng.next_u64() % 2);
      Matrix y(m, m);
      for (int i = 0; i < m; ++i) {
        y(i, i) = 1.5 * rng.normal();
        for (int j = i + 1; j < m; ++j) {
          y(i, j) = Complex(rng.normal(), rng.normal());
          y(j, i) = std::conj(y(i, j));
        }
      }
      HermitianMatrix hy(y);
      Matrix q = matrix_gibbs_map(hy).mat();
      Matrix q_ref = m == 2 ? bloch_entropy_maximizer(hy.mat())
                            : spectrahedron_entropy_maximizer(hy.mat());
      out.matrix_deviation = std::max(
          out.matrix_deviation, (q - q_ref).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

}  // namespace axl::reference
