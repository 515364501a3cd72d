"""Online MIMO-OFDM rate maximization: exponential-learning transmit policy,
Rayleigh-fading channel simulator and regret/efficiency benchmarks.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from axlsim._core import (  # noqa: F401
    InfeasibleError,
    Learner,
    ScenarioConfigError,
    SimulatorError,
    capped_entropy,
    capped_gibbs_map,
    expm,
    gibbs_entropy,
    gibbs_map,
    gradient_matrices,
    inv_sqrtm,
    log_sum_exp,
    log_trace_exp,
    matrix_gibbs_map,
    nullspace_basis,
    optimal_eta,
    rate,
    run_scenario,
    run_static_mac,
    verify_maps,
    von_neumann_entropy,
    water_fill,
)

__all__ = [
    "InfeasibleError",
    "Learner",
    "ScenarioConfigError",
    "SimulatorError",
    "capped_entropy",
    "capped_gibbs_map",
    "expm",
    "gibbs_entropy",
    "gibbs_map",
    "gradient_matrices",
    "inv_sqrtm",
    "log_sum_exp",
    "log_trace_exp",
    "matrix_gibbs_map",
    "nullspace_basis",
    "optimal_eta",
    "rate",
    "run_scenario",
    "run_static_mac",
    "verify_maps",
    "von_neumann_entropy",
    "water_fill",
]
