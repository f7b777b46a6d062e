"""Control engine for sequential inference-time scaling.

Models answer-correctness dynamics as a two-state chain, computes
closed-form accuracy trajectories, regimes, bounds and optimal stopping
iterations, and runs the gated MAP control loop over synthetic or remote
backends.
"""

from ._core import (
    BetaPosterior,
    TransitionModel,
    asymptotic_benefit,
    benefit_at,
    brute_force_optimal_iterations,
    classify_regime,
    convergence_limit,
    correct_probability_at,
    count_transitions,
    estimate_transition_model,
    init_prior,
    map_estimate,
    monte_carlo_correct_probability,
    optimal_iterations,
    run_config,
    simulate_chain,
    stopping_satisfied,
    transition_matrix_power,
    update_posterior,
)

__all__ = [
    "BetaPosterior",
    "TransitionModel",
    "asymptotic_benefit",
    "benefit_at",
    "brute_force_optimal_iterations",
    "classify_regime",
    "convergence_limit",
    "correct_probability_at",
    "count_transitions",
    "estimate_transition_model",
    "init_prior",
    "map_estimate",
    "monte_carlo_correct_probability",
    "optimal_iterations",
    "run_config",
    "simulate_chain",
    "stopping_satisfied",
    "transition_matrix_power",
    "update_posterior",
]
