#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "axl/convex_maps.hpp"
#include "axl/policies.hpp"
#include "axl/rate_model.hpp"
#include "axl/reference.hpp"
#include "axl/scenario.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

axl::TransmitProfile make_profile(const axl::Vector& powers,
                                  const std::vector<axl::Matrix>& covariances) {
  axl::TransmitProfile profile;
  profile.powers = powers;
  profile.covariances.reserve(covariances.size());
  for (const axl::Matrix& q : covariances) {
    profile.covariances.emplace_back(axl::HermitianMatrix(q));
  }
  return profile;
}

axl::ChannelEpoch make_epoch(const std::vector<axl::Matrix>& channels) {
  axl::ChannelEpoch epoch;
  epoch.effective_channels = channels;
  for (const axl::Matrix& h : channels) {
    Eigen::JacobiSVD<axl::Matrix> svd(h);
    epoch.bound_estimate =
        std::max(epoch.bound_estimate, svd.singularValues()(0));
  }
  return epoch;
}

std::vector<axl::Matrix> unwrap(const std::vector<axl::HermitianMatrix>& ms) {
  std::vector<axl::Matrix> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.mat());
  return out;
}

/// Stateful wrapper pairing a constraint set with the learner's scores.
class Learner {
 public:
  Learner(int carriers, double total_power, int antennas, double eta,
          std::optional<axl::Vector> caps)
      : cs_(caps ? axl::ConstraintSet::make(carriers, total_power, *caps, {},
                                            antennas)
                 : axl::ConstraintSet::uncapped(carriers, total_power,
                                                antennas)),
        state_(axl::AxlState::initial(cs_, eta)) {}

  py::tuple profile() const {
    axl::TransmitProfile p = axl::axl_profile(state_, cs_);
    std::vector<axl::Matrix> covs;
    for (const auto& q : p.covariances) covs.push_back(q.mat());
    return py::make_tuple(p.powers, covs);
  }

  void update(const axl::Vector& powers,
              const std::vector<axl::Matrix>& covariances,
              const std::vector<axl::Matrix>& observed) {
    axl::TransmitProfile played = make_profile(powers, covariances);
    std::vector<axl::HermitianMatrix> ms;
    ms.reserve(observed.size());
    for (const axl::Matrix& m : observed) ms.emplace_back(m);
    state_ = axl::axl_update(state_, played, ms, cs_.total_power);
  }

  int epoch() const { return state_.epoch; }
  axl::Vector power_scores() const { return state_.power_scores; }

 private:
  axl::ConstraintSet cs_;
  axl::AxlState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online MIMO-OFDM rate maximization: exponential-learning policy, "
            "channel simulator and benchmarks";

  // Translators run newest-first, so the base error goes in first.
  py::register_exception<axl::Error>(m, "SimulatorError");
  py::register_exception<axl::InfeasibleError>(m, "InfeasibleError");
  py::register_exception<axl::ConfigError>(m, "ScenarioConfigError");

  // hermitian primitives
  m.def(
      "expm",
      [](const axl::Matrix& a) { return axl::expm(axl::HermitianMatrix(a)).mat(); },
      "a"_a, "Matrix exponential of a Hermitian matrix");
  m.def(
      "inv_sqrtm",
      [](const axl::Matrix& a) {
        return axl::inv_sqrtm(axl::HermitianMatrix(a)).mat();
      },
      "a"_a, "Inverse square root of a positive-definite Hermitian matrix");
  m.def("nullspace_basis", &axl::nullspace_basis, "u"_a,
        "Orthonormal basis of the orthogonal complement of range(u)");

  // choice maps and entropies
  m.def(
      "gibbs_map",
      [](const axl::Vector& y) { return axl::gibbs_map(y).weights; }, "y"_a);
  m.def(
      "capped_gibbs_map",
      [](const axl::Vector& y, const axl::Vector& caps, double budget) {
        axl::CappedAllocation a = axl::capped_gibbs_map(y, caps, budget);
        return py::make_tuple(a.powers,
                              axl::solve_capped_lambda(y, caps, budget));
      },
      "y"_a, "caps"_a, "budget"_a,
      "Returns (powers, lambda) for the cap-respecting choice map");
  m.def(
      "matrix_gibbs_map",
      [](const axl::Matrix& y) {
        return axl::matrix_gibbs_map(axl::HermitianMatrix(y)).mat();
      },
      "y"_a);
  m.def("gibbs_entropy", &axl::gibbs_entropy, "weights"_a);
  m.def("capped_entropy", &axl::capped_entropy, "p"_a, "caps"_a);
  m.def(
      "von_neumann_entropy",
      [](const axl::Matrix& q) {
        return axl::von_neumann_entropy(
            axl::DensityMatrix(axl::HermitianMatrix(q)));
      },
      "q"_a);
  m.def("log_sum_exp", &axl::log_sum_exp, "y"_a);
  m.def(
      "log_trace_exp",
      [](const axl::Matrix& y) {
        return axl::log_trace_exp(axl::HermitianMatrix(y));
      },
      "y"_a);

  // rate model
  m.def(
      "rate",
      [](const axl::Vector& powers, const std::vector<axl::Matrix>& covs,
         const std::vector<axl::Matrix>& channels) {
        return axl::rate(make_profile(powers, covs), make_epoch(channels));
      },
      "powers"_a, "covariances"_a, "channels"_a,
      "Achievable rate in nats per channel use");
  m.def(
      "gradient_matrices",
      [](const axl::Vector& powers, const std::vector<axl::Matrix>& covs,
         const std::vector<axl::Matrix>& channels) {
        return unwrap(axl::gradient_matrices(make_profile(powers, covs),
                                             make_epoch(channels)));
      },
      "powers"_a, "covariances"_a, "channels"_a);

  // policies
  m.def("optimal_eta", &axl::optimal_eta, "total_power"_a, "gradient_bound"_a,
        "carriers"_a, "open_dims"_a);
  m.def("water_fill", &axl::water_fill, "gains"_a, "total"_a);

  py::class_<Learner>(m, "Learner",
                      "Exponential-learning transmit policy over a capped "
                      "power/covariance feasible set")
      .def(py::init<int, double, int, double, std::optional<axl::Vector>>(),
           "carriers"_a, "total_power"_a, "antennas"_a, "eta"_a = 1.0,
           "caps"_a = std::nullopt)
      .def("profile", &Learner::profile,
           "Current (powers, covariances) decision")
      .def("update", &Learner::update, "powers"_a, "covariances"_a,
           "observed"_a, "Accumulate observed gradients for the played profile")
      .def_property_readonly("epoch", &Learner::epoch)
      .def_property_readonly("power_scores", &Learner::power_scores);

  // scenario harness
  m.def(
      "run_scenario",
      [](const std::string& config_json, const std::string& out_dir) {
        return axl::run_scenario_to_files(
            axl::parse_scenario_config(config_json), out_dir);
      },
      "config_json"_a, "out_dir"_a,
      "Run a dynamic scenario from a JSON string; writes CSV + metadata, "
      "returns the exit status");
  m.def(
      "run_static_mac",
      [](const std::string& config_json, const std::string& out_dir) {
        return axl::run_static_mac_to_files(
            axl::parse_scenario_config(config_json), out_dir);
      },
      "config_json"_a, "out_dir"_a);
  m.def(
      "verify_maps",
      [](int instances, std::uint64_t seed) {
        axl::reference::MapVerification v =
            axl::reference::verify_maps(instances, seed);
        py::dict d;
        d["gibbs_deviation"] = v.gibbs_deviation;
        d["capped_deviation"] = v.capped_deviation;
        d["matrix_deviation"] = v.matrix_deviation;
        d["lambda_residual"] = v.lambda_residual;
        d["instances"] = v.instances;
        return d;
      },
      "instances"_a = 100, "seed"_a = 1);
}
