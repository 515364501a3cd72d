#include "axl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace axl {

RegretLedger::RegretLedger(std::vector<std::string> benchmark_names, double eta,
                           double total_power, int carriers,
                           std::vector<int> open_dims)
    : benchmark_names_(std::move(benchmark_names)),
      eta_(eta),
      total_power_(total_power) {
  if (benchmark_names_.empty()) {
    throw InvalidInputError("RegretLedger: need at least one benchmark");
  }
  if (eta_ <= 0.0 || total_power_ <= 0.0 || carriers < 1) {
    throw InvalidInputError("RegretLedger: bad constants");
  }
  entropy_budget_ = std::log(static_cast<double>(carriers));
  for (int m : open_dims) {
    entropy_budget_ += std::log(static_cast<double>(m));
  }
  benchmark_cumulative_.resize(benchmark_names_.size());
}

void RegretLedger::record_epoch(double policy_payoff,
                                const std::vector<double>& benchmark_payoffs,
                                double gradient_norm) {
  if (benchmark_payoffs.size() != benchmark_names_.size()) {
    throw InvalidInputError("RegretLedger: benchmark payoff count mismatch");
  }
  const double prev_policy =
      policy_cumulative_.empty() ? 0.0 : policy_cumulative_.back();
  policy_cumulative_.push_back(prev_policy + policy_payoff);
  for (std::size_t b = 0; b < benchmark_payoffs.size(); ++b) {
    const double prev = benchmark_cumulative_[b].empty()
                            ? 0.0
                            : benchmark_cumulative_[b].back();
    benchmark_cumulative_[b].push_back(prev + benchmark_payoffs[b]);
  }
  const double prev_m = running_m_.empty() ? 0.0 : running_m_.back();
  running_m_.push_back(std::max(prev_m, gradient_norm));
}

double RegretLedger::average_regret(std::size_t benchmark,
                                    int upto_epoch) const {
  if (upto_epoch < 1 || upto_epoch > horizon()) {
    throw InvalidInputError("average_regret: epoch out of range");
  }
  const std::size_t t = static_cast<std::size_t>(upto_epoch) - 1;
  return (benchmark_cumulative_[benchmark][t] - policy_cumulative_[t]) /
         static_cast<double>(upto_epoch);
}

double RegretLedger::max_average_regret(int upto_epoch) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < benchmark_names_.size(); ++b) {
    worst = std::max(worst, average_regret(b, upto_epoch));
  }
  return worst;
}

double RegretLedger::running_gradient_bound(int upto_epoch) const {
  if (upto_epoch < 1 || upto_epoch > horizon()) {
    throw InvalidInputError("running_gradient_bound: epoch out of range");
  }
  return running_m_[static_cast<std::size_t>(upto_epoch) - 1];
}

double RegretLedger::theoretical_bound(int upto_epoch) const {
  const double m = running_gradient_bound(upto_epoch);
  const double r = entropy_budget_ / eta_ +
                   4.0 * total_power_ * total_power_ * m * m * eta_;
  return r / std::sqrt(static_cast<double>(upto_epoch));
}

EfficiencyReport make_efficiency_report(std::vector<double> sum_rates,
                                        double psi_max, double psi_min,
                                        int min_vertex_samples) {
  if (!(psi_max > psi_min)) {
    throw InvalidInputError(
        "efficiency: psi_max <= psi_min leaves the ratio undefined");
  }
  EfficiencyReport report;
  report.psi_max = psi_max;
  report.psi_min = psi_min;
  report.min_vertex_samples = min_vertex_samples;
  report.efficiency.reserve(sum_rates.size());
  for (double psi : sum_rates) {
    if (psi < psi_min - 1e-9 || psi > psi_max + 1e-9) {
      throw InvalidInputError("efficiency: sum rate escapes [psi_min, psi_max]");
    }
    report.efficiency.push_back((psi - psi_min) / (psi_max - psi_min));
  }
  report.sum_rates = std::move(sum_rates);
  return report;
}

}  // namespace axl
