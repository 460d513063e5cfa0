import math

import pytest

import qrepeater


def test_two_segments_closed_form():
    for p, a in [(0.5, 0.5), (0.1, 0.9), (1.0, 0.3)]:
        got = qrepeater.solve(2, p, a)["value"]
        assert math.isclose(got, (3 - 2 * p) / (a * p * (2 - p)), rel_tol=1e-10)


def test_state_counts():
    assert len(qrepeater.enumerate_states(4)) == 21
    assert qrepeater.enumerate_states(4, "cc")[-1] == "4"
    assert qrepeater.predicted_count(10) == 5545
    assert qrepeater.mdp_size(4, "cc") == (45, 56)


def test_named_policies_and_evaluation():
    pi0 = qrepeater.policy(4, 0.3, 0.3, "nocc", "pi0")
    assert pi0["0110"] == "wait"
    opt = qrepeater.solve(4, 0.3, 0.3)
    for name in ("doubling", "swap-asap", "pi1"):
        assert qrepeater.evaluate(4, 0.3, 0.3, "nocc", name)["value"] >= opt["value"] * (1 - 1e-12)
    again = qrepeater.evaluate(4, 0.3, 0.3, "nocc", opt["policy"])
    assert math.isclose(again["value"], opt["value"], rel_tol=1e-12)


def test_simulation():
    est = qrepeater.simulate(2, 0.5, 0.5, "nocc", "swap-asap", trials=20000, seed=3)
    assert abs(est["mean"] - 16 / 3) <= 4 * est["stderr"]
    one = qrepeater.simulate(2, 0.5, 0.5, "nocc", "swap-asap", trials=1)
    assert one["stderr"] == 0.0 and "warning" in one


def test_errors():
    with pytest.raises(ValueError):
        qrepeater.solve(4, 0.0, 0.5)
    with pytest.raises(ValueError):
        qrepeater.solve(4, 0.5, 0.5, "bogus")
    with pytest.raises(ValueError):
        qrepeater.policy(5, 0.5, 0.5, "nocc", "pi0")
