#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace axl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain argument.
struct InvalidInputError : Error {
  using Error::Error;
};

/// Matrix too close to singular for the requested operation.
struct SingularityError : Error {
  SingularityError(const std::string& what, double min_eig)
      : Error(what), min_eigenvalue(min_eig) {}
  double min_eigenvalue;
};

/// Constraint set admits no feasible point.
struct InfeasibleError : Error {
  using Error::Error;
};

/// Iterative solver ran out of iterations; `gap` is the residual certificate.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double gap_value)
      : Error(what), gap(gap_value) {}
  double gap;
};

/// Scenario file problem; `field` names the offending key when known.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what, std::string bad_field = {})
      : Error(what), field(std::move(bad_field)) {}
  std::string field;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Wraps the (fully specified) mt19937_64 engine
/// and provides its own distribution transforms so that two runs with the same
/// seed produce bit-identical sequences on any platform. `fork` derives an
/// independent substream, used to give every link/user its own race-free
/// generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (second value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  /// Circularly symmetric complex normal with unit variance, CN(0, 1).
  Complex cnormal() {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    double re = normal();
    double im = normal();
    return {kInvSqrt2 * re, kInvSqrt2 * im};
  }

  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  /// Independent substream keyed by (a, b); streams with distinct keys do not
  /// overlap in any practical sense.
  Rng fork(std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = engine_();
    s ^= 0x632be59bd9b4e019ull + a * 0x9e3779b97f4a7c15ull;
    splitmix64(s);
    s ^= b * 0xd1342543de82ef95ull;
    return Rng(splitmix64(s));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace axl
