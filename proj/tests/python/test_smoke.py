import json
import math

import pytest

import seqscale as ss


def test_transition_model_derived_quantities():
    model = ss.TransitionModel(0.1, 0.3)
    assert math.isclose(model.lambda_, 0.6, abs_tol=1e-12)
    assert math.isclose(model.fixed_point, 0.75, abs_tol=1e-12)
    with pytest.raises(ValueError):
        ss.TransitionModel(0.0, 0.0)


def test_markov_closed_forms():
    model = ss.TransitionModel(0.2, 0.6)
    power = ss.transition_matrix_power(model, 2)
    assert math.isclose(power[0][0], 0.76, abs_tol=1e-12)
    assert math.isclose(power[1][1], 0.28, abs_tol=1e-12)
    assert math.isclose(ss.correct_probability_at(model, 0.5, 1), 0.70, abs_tol=1e-12)
    assert math.isclose(ss.convergence_limit(model), 0.75, abs_tol=1e-12)

    weak = ss.TransitionModel(0.1, 0.3)
    assert math.isclose(ss.benefit_at(weak, 0.9, 0.02, 1), -0.04, abs_tol=1e-12)
    assert math.isclose(ss.asymptotic_benefit(weak, 0.2, 0.0), 0.55, abs_tol=1e-12)
    assert ss.classify_regime(weak, 0.5, 0.02) == "beneficial"
    assert ss.classify_regime(weak, 0.9, 0.02) == "detrimental"
    assert ss.classify_regime(weak, 0.77, 0.02) == "neutral"


def test_optimal_stopping():
    model = ss.TransitionModel(0.1, 0.3)
    decision = ss.optimal_iterations(model, 0.2, 0.7)
    assert decision["reachable"]
    assert decision["iterations"] == 5
    assert decision["case"] == "case3_2_finite"

    unreachable = ss.optimal_iterations(model, 0.2, 0.8)
    assert not unreachable["reachable"]
    assert unreachable["iterations"] is None

    scan = ss.brute_force_optimal_iterations(model, 0.2, 0.7)
    assert scan["outcome"] == "found"
    assert scan["iterations"] == 5

    assert ss.stopping_satisfied(model, 0.2, 0.7, 5)
    assert not ss.stopping_satisfied(model, 0.2, 0.7, 4)


def test_beta_map_estimation():
    posterior = ss.init_prior(0.9, 10.0)
    assert (posterior.alpha, posterior.beta) == (9.0, 1.0)
    posterior = ss.update_posterior(posterior, 0.5)
    assert math.isclose(ss.map_estimate(posterior), 8.5 / 9.0, abs_tol=1e-12)
    assert math.isclose(ss.map_estimate(ss.BetaPosterior(0.5, 2.0)), 0.2, abs_tol=1e-12)


def test_transition_counting_and_estimation():
    counts = ss.count_transitions([True, False, True, True, False])
    assert counts == {
        "from_correct": 3,
        "correct_to_wrong": 2,
        "from_wrong": 1,
        "wrong_to_correct": 1,
    }
    model = ss.estimate_transition_model(3, 2, 1, 1)
    assert math.isclose(model.a, 2.0 / 3.0, rel_tol=1e-9)
    assert math.isclose(model.b, 1.0, abs_tol=1e-12)


def test_simulation():
    frozen = ss.simulate_chain("q", 1.0, 0.0, 0.0, 5, 1)
    assert frozen == [True] * 5
    again = ss.simulate_chain("q", 0.5, 0.2, 0.6, 100, 7)
    assert again == ss.simulate_chain("q", 0.5, 0.2, 0.6, 100, 7)

    estimate, se = ss.monte_carlo_correct_probability(0.5, 0.2, 0.6, 1, 20000, 3)
    assert abs(estimate - 0.70) <= 4 * se


def test_full_synthetic_run():
    config = {
        "run_seed": 5,
        "output_dir": "unused",
        "controller": {
            "tau": 0.7,
            "sigma": 0.02,
            "gamma": 10.0,
            "max_iterations": 32,
            "variant": "map",
            "state_source": "truth_labels",
        },
        "backend": {"synthetic": {}},
        "dataset": [
            {"id": "hard", "p0": 0.2, "a": 0.1, "b": 0.3},
            {"id": "easy", "p0": 0.9, "a": 0.1, "b": 0.3},
        ],
    }
    out = ss.run_config(json.dumps(config))
    records = {record["question_id"]: record for record in out["records"]}
    assert records["easy"]["stop_reason"] == "gated"
    assert records["easy"]["iterations"] == []
    assert records["hard"]["stop_reason"] in ("stopping_rule_met", "budget_exhausted")
    assert len(records["hard"]["iterations"]) >= 1
    bounds = json.loads(out["bounds"])
    assert bounds["counts"]["beneficial"] == 1
    assert bounds["counts"]["detrimental"] == 1
