#include "axl/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace axl {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kTruncationSigmas = 5.0;

using nlohmann::json;

double require_positive(const json& j, const char* key, double fallback,
                        bool allow_zero = false) {
  if (!j.contains(key)) return fallback;
  double v = j.at(key).get<double>();
  if (v < 0.0 || (!allow_zero && v == 0.0)) {
    throw ConfigError(std::string(key) + " must be positive", key);
  }
  return v;
}

int require_positive_int(const json& j, const char* key, int fallback,
                         bool allow_zero = false) {
  if (!j.contains(key)) return fallback;
  int v = j.at(key).get<int>();
  if (v < 0 || (!allow_zero && v == 0)) {
    throw ConfigError(std::string(key) + " must be positive", key);
  }
  return v;
}

NoiseModel parse_noise(const json& j) {
  NoiseModel m;
  static const std::vector<std::string> known = {"kind", "sigma",
                                                 "relative_level"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown noise key: " + it.key(), "noise." + it.key());
    }
  }
  const std::string kind = j.value("kind", "none");
  if (kind == "none") {
    m.kind = NoiseModel::Kind::none;
  } else if (kind == "bounded-uniform") {
    m.kind = NoiseModel::Kind::bounded_uniform;
  } else if (kind == "truncated-gaussian") {
    m.kind = NoiseModel::Kind::truncated_gaussian;
  } else {
    throw ConfigError("unknown noise kind: " + kind, "noise.kind");
  }
  m.sigma = require_positive(j, "sigma", 0.0, true);
  m.relative_level = require_positive(j, "relative_level", 0.0, true);
  return m;
}

SuConstraintConfig parse_su(const json& j, int carriers) {
  SuConstraintConfig c;
  static const std::vector<std::string> known = {"total_power", "caps",
                                                 "null_dims"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown su_constraints key: " + it.key(),
                        "su_constraints." + it.key());
    }
  }
  c.total_power = require_positive(j, "total_power", 1.0);
  if (j.contains("caps")) {
    const json& caps = j.at("caps");
    if (caps.is_number()) {
      c.caps = Vector::Constant(carriers, caps.get<double>());
    } else {
      auto v = caps.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != carriers) {
        throw ConfigError("caps must be scalar or one value per carrier",
                          "su_constraints.caps");
      }
      c.caps = Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if ((c.caps.array() <= 0.0).any()) {
      throw ConfigError("caps must be positive", "su_constraints.caps");
    }
  }
  c.null_dims = require_positive_int(j, "null_dims", 0, true);
  return c;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_carriers <= 0) throw ConfigError("K must be positive", "K");
  if (num_su <= 0) throw ConfigError("num_SU must be positive", "num_SU");
  if (num_pu < 0) throw ConfigError("num_PU must be nonnegative", "num_PU");
  if (tx_antennas <= 0 || rx_antennas <= 0) {
    throw ConfigError("antenna counts must be positive", "tx_antennas");
  }
  if (carrier_frequency <= 0.0) {
    throw ConfigError("carrier_frequency must be positive", "carrier_frequency");
  }
  if (epoch_duration <= 0.0) {
    throw ConfigError("epoch_duration must be positive", "epoch_duration");
  }
  if (user_speed_min < 0.0 || user_speed_max < user_speed_min) {
    throw ConfigError("user_speed range must satisfy 0 <= min <= max",
                      "user_speed");
  }
  if (num_pu > 0 && (pu_arrival_rate <= 0.0 || pu_departure_rate <= 0.0)) {
    throw ConfigError("PU rates must be positive", "pu_arrival_rate");
  }
  if (noise_power <= 0.0) {
    throw ConfigError("noise_power must be positive", "noise_power");
  }
  if (num_pu > 0 && pu_power < 0.0) {
    throw ConfigError("pu_power must be nonnegative", "pu_power");
  }
  if (horizon < 0) throw ConfigError("horizon must be nonnegative", "horizon");
  if (eta <= 0.0) throw ConfigError("eta must be positive", "eta");
  if (su.null_dims >= tx_antennas) {
    throw ConfigError("null_dims must leave at least one open dimension",
                      "su_constraints.null_dims");
  }
  if (su.caps.size() != 0 && su.caps.sum() < su.total_power) {
    throw ConfigError("sum of caps below the total power budget",
                      "su_constraints.caps");
  }
  if (randomized_discount < 0.0 || randomized_discount > 1.0) {
    throw ConfigError("randomized_discount must lie in [0, 1]",
                      "randomized_discount");
  }
  if (kind != "regret" && kind != "tracking" && kind != "static-mac") {
    throw ConfigError("kind must be regret, tracking or static-mac", "kind");
  }
  // A2: the channel must move slowly relative to the epoch clock.
  const double doppler =
      2.0 * user_speed_max * carrier_frequency / kSpeedOfLight;
  if (doppler * epoch_duration > 0.5) {
    std::fprintf(stderr,
                 "warning: doppler * epoch_duration = %.3f; channel decorrelates "
                 "within a single epoch\n",
                 doppler * epoch_duration);
  }
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario file is not valid JSON: ") +
                      e.what());
  }
  static const std::vector<std::string> known = {
      "K",           "num_PU",          "num_SU",
      "tx_antennas", "rx_antennas",     "carrier_frequency",
      "epoch_duration", "user_speed",   "pu_arrival_rate",
      "pu_departure_rate", "noise_power", "pu_power",
      "su_constraints", "noise",        "rng_seed",
      "horizon",     "eta",             "kind",
      "policies",    "subcarrier_correlated", "randomized_discount"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown scenario key: " + it.key(), it.key());
    }
  }

  ScenarioConfig c;
  c.num_carriers = require_positive_int(j, "K", c.num_carriers);
  c.num_pu = require_positive_int(j, "num_PU", c.num_pu, true);
  c.num_su = require_positive_int(j, "num_SU", c.num_su);
  c.tx_antennas = require_positive_int(j, "tx_antennas", c.tx_antennas);
  c.rx_antennas = require_positive_int(j, "rx_antennas", c.rx_antennas);
  c.carrier_frequency =
      require_positive(j, "carrier_frequency", c.carrier_frequency);
  c.epoch_duration = require_positive(j, "epoch_duration", c.epoch_duration);
  if (j.contains("user_speed")) {
    const json& v = j.at("user_speed");
    if (v.is_number()) {
      c.user_speed_min = c.user_speed_max = v.get<double>();
    } else {
      auto r = v.get<std::vector<double>>();
      if (r.size() != 2) {
        throw ConfigError("user_speed must be a number or [min, max]",
                          "user_speed");
      }
      c.user_speed_min = r[0];
      c.user_speed_max = r[1];
    }
  }
  c.pu_arrival_rate = require_positive(j, "pu_arrival_rate", c.pu_arrival_rate);
  c.pu_departure_rate =
      require_positive(j, "pu_departure_rate", c.pu_departure_rate);
  c.noise_power = require_positive(j, "noise_power", c.noise_power);
  c.pu_power = require_positive(j, "pu_power", c.pu_power, true);
  if (j.contains("su_constraints")) {
    c.su = parse_su(j.at("su_constraints"), c.num_carriers);
  }
  if (j.contains("noise")) c.noise = parse_noise(j.at("noise"));
  if (j.contains("rng_seed")) c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.horizon = require_positive_int(j, "horizon", c.horizon, true);
  c.eta = require_positive(j, "eta", c.eta);
  if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
  if (j.contains("policies")) {
    c.policies = j.at("policies").get<std::vector<std::string>>();
  }
  if (j.contains("subcarrier_correlated")) {
    c.subcarrier_correlated = j.at("subcarrier_correlated").get<bool>();
  }
  if (j.contains("randomized_discount")) {
    c.randomized_discount = j.at("randomized_discount").get<double>();
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str());
}

JakesLink::JakesLink(int carriers, int rx, int tx, double doppler_hz,
                     double epoch_duration, bool correlated_carriers, Rng rng)
    : carriers_(carriers),
      rx_(rx),
      tx_(tx),
      groups_(correlated_carriers ? 1 : carriers),
      doppler_hz_(doppler_hz) {
  const std::size_t entries =
      static_cast<std::size_t>(groups_) * rx_ * tx_ * kOscillators;
  phasor_.resize(entries);
  step_.resize(entries);
  // Arrival angles are spread over the half circle so every oscillator gets a
  // distinct Doppler shift; pairs of mirrored angles would otherwise share a
  // frequency and spoil single-realization ergodicity.
  const double angle_spacing = kPi / kOscillators;
  std::size_t idx = 0;
  for (int g = 0; g < groups_; ++g) {
    for (int e = 0; e < rx_ * tx_; ++e) {
      const double rot = rng.uniform(0.0, angle_spacing);
      for (int o = 0; o < kOscillators; ++o) {
        const double alpha = angle_spacing * (o + 0.5) + rot;
        const double omega = 2.0 * kPi * doppler_hz_ * std::cos(alpha);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        phasor_[idx] = Complex(std::cos(phase), std::sin(phase));
        step_[idx] = Complex(std::cos(omega * epoch_duration),
                             std::sin(omega * epoch_duration));
        ++idx;
      }
    }
  }
  channels_.assign(static_cast<std::size_t>(carriers_), Matrix(rx_, tx_));
  materialize();
}

void JakesLink::advance() {
  for (std::size_t i = 0; i < phasor_.size(); ++i) phasor_[i] *= step_[i];
  if (++steps_since_renorm_ >= 4096) {
    for (auto& p : phasor_) p /= std::abs(p);
    steps_since_renorm_ = 0;
  }
  materialize();
}

void JakesLink::materialize() {
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(kOscillators));
  for (int k = 0; k < carriers_; ++k) {
    const int g = groups_ == 1 ? 0 : k;
    Matrix& h = channels_[static_cast<std::size_t>(k)];
    std::size_t base =
        static_cast<std::size_t>(g) * rx_ * tx_ * kOscillators;
    for (int c = 0; c < tx_; ++c) {
      for (int r = 0; r < rx_; ++r) {
        Complex sum = 0.0;
        const std::size_t e = base + static_cast<std::size_t>(r * tx_ + c) *
                                         kOscillators;
        for (int o = 0; o < kOscillators; ++o) sum += phasor_[e + o];
        h(r, c) = inv_sqrt_n * sum;
      }
    }
  }
}

NetworkState::NetworkState(const ScenarioConfig& cfg)
    : cfg_(cfg), epoch_(1), rng_(cfg.rng_seed) {
  cfg_.validate();
  const int users = num_users();

  Rng speed_rng = rng_.fork(0x5eed, 0);
  speeds_.resize(static_cast<std::size_t>(users));
  for (int q = 0; q < users; ++q) {
    speeds_[static_cast<std::size_t>(q)] =
        speed_rng.uniform(cfg_.user_speed_min, cfg_.user_speed_max);
  }

  // Primary activity starts from the stationary on/off distribution.
  pu_.resize(static_cast<std::size_t>(cfg_.num_pu));
  pu_rng_.reserve(pu_.size());
  for (int p = 0; p < cfg_.num_pu; ++p) {
    pu_rng_.push_back(rng_.fork(0x9u, static_cast<std::uint64_t>(p)));
    Rng& r = pu_rng_.back();
    const double mean_on = 1.0 / cfg_.pu_departure_rate;
    const double mean_off = 1.0 / cfg_.pu_arrival_rate;
    PuProcess& proc = pu_[static_cast<std::size_t>(p)];
    proc.on = r.uniform() < mean_on / (mean_on + mean_off);
    proc.residual_s = r.exponential(proc.on ? cfg_.pu_departure_rate
                                            : cfg_.pu_arrival_rate);
  }

  links_.reserve(static_cast<std::size_t>(users) * cfg_.num_su);
  for (int q = 0; q < users; ++q) {
    for (int s = 0; s < cfg_.num_su; ++s) {
      const double rel_speed = speeds_[static_cast<std::size_t>(q)] +
                               speeds_[static_cast<std::size_t>(cfg_.num_pu + s)];
      const double doppler = rel_speed * cfg_.carrier_frequency / kSpeedOfLight;
      links_.emplace_back(cfg_.num_carriers, cfg_.rx_antennas, cfg_.tx_antennas,
                          doppler, cfg_.epoch_duration,
                          cfg_.subcarrier_correlated,
                          rng_.fork(0xfade, static_cast<std::uint64_t>(
                                                q * cfg_.num_su + s)));
    }
  }

  su_constraints_.reserve(static_cast<std::size_t>(cfg_.num_su));
  Rng null_rng = rng_.fork(0x0511, 0);
  for (int s = 0; s < cfg_.num_su; ++s) {
    Vector caps = cfg_.su.caps.size() != 0
                      ? cfg_.su.caps
                      : Vector::Constant(cfg_.num_carriers, cfg_.su.total_power);
    std::vector<Matrix> bases;
    if (cfg_.su.null_dims > 0) {
      bases.reserve(static_cast<std::size_t>(cfg_.num_carriers));
      for (int k = 0; k < cfg_.num_carriers; ++k) {
        Matrix u(cfg_.tx_antennas, cfg_.su.null_dims);
        for (Eigen::Index col = 0; col < u.cols(); ++col) {
          for (Eigen::Index row = 0; row < u.rows(); ++row) {
            u(row, col) = null_rng.cnormal();
          }
        }
        bases.push_back(nullspace_basis(u));
      }
    }
    su_constraints_.push_back(ConstraintSet::make(
        cfg_.num_carriers, cfg_.su.total_power, std::move(caps),
        std::move(bases), cfg_.tx_antennas));
  }

  su_covariances_.assign(
      static_cast<std::size_t>(cfg_.num_su),
      std::vector<Matrix>(static_cast<std::size_t>(cfg_.num_carriers),
                          Matrix::Zero(cfg_.tx_antennas, cfg_.tx_antennas)));
  bound_estimates_.assign(static_cast<std::size_t>(cfg_.num_su), 0.0);
}

std::size_t NetworkState::link_index(int tx_user, int su) const {
  return static_cast<std::size_t>(tx_user) * cfg_.num_su +
         static_cast<std::size_t>(su);
}

const Matrix& NetworkState::channel(int tx_user, int su, int carrier) const {
  return links_[link_index(tx_user, su)].channel(carrier);
}

void NetworkState::advance_epoch() {
  for (int p = 0; p < cfg_.num_pu; ++p) {
    PuProcess& proc = pu_[static_cast<std::size_t>(p)];
    Rng& r = pu_rng_[static_cast<std::size_t>(p)];
    double remaining = cfg_.epoch_duration;
    while (proc.residual_s <= remaining) {
      remaining -= proc.residual_s;
      proc.on = !proc.on;
      proc.residual_s = r.exponential(proc.on ? cfg_.pu_departure_rate
                                              : cfg_.pu_arrival_rate);
    }
    proc.residual_s -= remaining;
  }
  for (auto& link : links_) link.advance();
  ++epoch_;
}

void NetworkState::set_su_covariances(int su, std::vector<Matrix> cov) {
  if (cov.size() != static_cast<std::size_t>(cfg_.num_carriers)) {
    throw InvalidInputError("set_su_covariances: one covariance per carrier");
  }
  su_covariances_[static_cast<std::size_t>(su)] = std::move(cov);
}

HermitianMatrix NetworkState::mui_covariance(int su, int carrier) const {
  const int n = cfg_.rx_antennas;
  Matrix w = cfg_.noise_power * Matrix::Identity(n, n);
  for (int p = 0; p < cfg_.num_pu; ++p) {
    if (!pu_on(p) || cfg_.pu_power == 0.0) continue;
    const Matrix& h = channel(p, su, carrier);
    // Uniform primary transmit covariance (pu_power / m) I while on.
    w += (cfg_.pu_power / cfg_.tx_antennas) * (h * h.adjoint());
  }
  for (int s = 0; s < cfg_.num_su; ++s) {
    if (s == su) continue;
    const Matrix& cov =
        su_covariances_[static_cast<std::size_t>(s)][static_cast<std::size_t>(carrier)];
    if (cov.size() == 0) continue;
    const Matrix& h = channel(cfg_.num_pu + s, su, carrier);
    w += h * cov * h.adjoint();
  }
  return HermitianMatrix(std::move(w));
}

ChannelEpoch NetworkState::effective_channels(int su) {
  ChannelEpoch out;
  out.epoch = epoch_;
  out.effective_channels.reserve(static_cast<std::size_t>(cfg_.num_carriers));
  const ConstraintSet& cs = su_constraints(su);
  double& bound = bound_estimates_[static_cast<std::size_t>(su)];
  for (int k = 0; k < cfg_.num_carriers; ++k) {
    HermitianMatrix w = mui_covariance(su, k);
    HermitianMatrix whitener = inv_sqrtm(w);
    Matrix reduced = reduce_by_null_shaping(
        whitener.mat() * channel(cfg_.num_pu + su, su, k),
        cs.null_bases[static_cast<std::size_t>(k)]);
    Eigen::SelfAdjointEigenSolver<Matrix> gram(reduced.adjoint() * reduced,
                                               Eigen::EigenvaluesOnly);
    bound = std::max(bound, std::sqrt(std::max(
                                gram.eigenvalues().maxCoeff(), 0.0)));
    out.effective_channels.push_back(std::move(reduced));
  }
  out.bound_estimate = bound;
  return out;
}

namespace {

HermitianMatrix gaussian_hermitian(Eigen::Index m, double entry_std, Rng& rng) {
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    g(i, i) = entry_std * rng.normal();
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Complex z = entry_std * rng.cnormal();
      g(i, j) = z;
      g(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(std::move(g));
}

}  // namespace

std::vector<HermitianMatrix> observe_gradients(
    const std::vector<HermitianMatrix>& grads, const NoiseModel& model,
    Rng& rng, NoiseStats* stats) {
  if (model.kind == NoiseModel::Kind::none) return grads;
  std::vector<HermitianMatrix> noisy;
  noisy.reserve(grads.size());
  for (const HermitianMatrix& m : grads) {
    const Eigen::Index dim = m.dim();
    const double sqrt_dim = std::sqrt(static_cast<double>(dim));
    if (model.kind == NoiseModel::Kind::bounded_uniform) {
      HermitianMatrix dir = gaussian_hermitian(dim, 1.0, rng);
      const double norm = dir.spectral_norm();
      const double scale =
          norm > 0.0 ? model.sigma * rng.uniform() / norm : 0.0;
      HermitianMatrix xi(scale * dir.mat());
      if (stats) {
        ++stats->draws;
        stats->max_norm = std::max(stats->max_norm, xi.spectral_norm());
      }
      noisy.emplace_back(m.mat() + xi.mat());
      continue;
    }
    // truncated-gaussian
    const double entry_std = model.relative_level > 0.0
                                 ? model.relative_level * m.frobenius_norm() /
                                       static_cast<double>(dim)
                                 : model.sigma / (kTruncationSigmas * sqrt_dim);
    if (entry_std == 0.0) {
      noisy.push_back(m);
      if (stats) ++stats->draws;
      continue;
    }
    const double norm_bound = kTruncationSigmas * entry_std * sqrt_dim;
    for (;;) {
      HermitianMatrix xi = gaussian_hermitian(dim, entry_std, rng);
      const double norm = xi.spectral_norm();
      if (norm > norm_bound) {
        if (stats) ++stats->rejected;
        continue;
      }
      if (stats) {
        ++stats->draws;
        stats->max_norm = std::max(stats->max_norm, norm);
      }
      noisy.emplace_back(m.mat() + xi.mat());
      break;
    }
  }
  return noisy;
}

}  // namespace axl
