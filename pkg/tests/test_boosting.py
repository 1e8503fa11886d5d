import math

import numpy as np
import pytest

from shapley_forge.boosting import (
    BoostState,
    BoostTargets,
    IterationCapError,
    boost,
    exact_dp_oracle,
    exact_enum_oracle,
    lbf_from_state,
    ltf_from_state,
    sampled_oracle,
)
from shapley_forge.games import VotingGame, lbf_fn, ltf_fn
from shapley_forge.mu import exact_correlations


def _realizable_targets(rng, n: int, xi: float) -> BoostTargets:
    g = VotingGame(rng.uniform(-1, 1, n), float(rng.uniform(-0.3, 0.3)))
    return BoostTargets(a=exact_correlations(ltf_fn(g), n), xi=xi)


def _append(state: BoostState, j: int, sign: int) -> None:
    state.counts[0 if sign > 0 else 1, j] += 1
    state.t += 1


def test_gamma_is_half_xi():
    t = BoostTargets(a=np.zeros(4), xi=0.1)
    assert t.gamma == pytest.approx(0.05)
    assert t.n == 3


def test_zero_iterations_when_targets_already_met():
    n = 4
    a = np.zeros(n + 1)
    res = boost(BoostTargets(a=a, xi=0.1), exact_enum_oracle(n))
    assert res.converged
    assert res.iterations == 0
    assert np.array_equal(res.state.net, np.zeros(n + 1, dtype=np.int64))


def test_state_translation_frozen_case():
    # two appends of -x0 and one of +x2 at gamma 0.1
    state = BoostState(n=3, gamma=0.1)
    _append(state, 0, -1)
    _append(state, 0, -1)
    _append(state, 2, +1)
    lbf = lbf_from_state(state)
    assert np.allclose(lbf.weights, [0.0, 0.1, 0.0], atol=1e-15)
    assert lbf.threshold == pytest.approx(0.2)
    g = ltf_from_state(state)
    assert np.allclose(g.weights, lbf.weights)
    assert g.threshold == lbf.threshold


def test_boost_converges_on_realizable_targets(rng):
    for n in (4, 6):
        for _ in range(3):
            targets = _realizable_targets(rng, n, xi=0.1)
            res = boost(targets, exact_enum_oracle(n))
            assert res.converged
            final = np.abs(targets.a - res.correlations).max()
            assert final <= targets.gamma + 1e-12
            assert res.iterations <= math.ceil(64.0 / targets.xi**2)


def test_every_appended_literal_was_a_real_violation(rng):
    targets = _realizable_targets(rng, 5, xi=0.08)
    res = boost(targets, exact_enum_oracle(5), record=True)
    assert res.converged
    assert len(res.history) == res.iterations
    for t, j, sign, viol in res.history:
        assert abs(viol) > targets.gamma
        assert sign == (1 if viol > 0 else -1)
        assert 0 <= j <= 5


def test_no_cancellation_of_appends(rng):
    # net literal counts account for every iteration: the left-out direction
    # of each slot is never touched
    for seed in range(4):
        local = np.random.default_rng(seed)
        targets = _realizable_targets(local, 5, xi=0.06)
        res = boost(targets, exact_enum_oracle(5))
        assert res.converged
        assert int(np.abs(res.state.net).sum()) == res.iterations


def test_iteration_cap_raises():
    n = 4
    a = np.full(n + 1, 1.0)  # jointly unreachable correlations
    with pytest.raises(IterationCapError):
        boost(BoostTargets(a=a, xi=0.1), exact_enum_oracle(n), cap=25)


def test_stall_window_stops_gracefully():
    n = 4
    a = np.full(n + 1, 1.0)
    res = boost(BoostTargets(a=a, xi=0.1), exact_enum_oracle(n), stall_window=20)
    assert not res.converged
    assert res.iterations <= 2000


def test_oracles_agree(rng):
    n = 6
    state = BoostState(n=n, gamma=0.05)
    for _ in range(40):
        _append(state, int(rng.integers(0, n + 1)), 1 if rng.random() < 0.5 else -1)
    enum = exact_enum_oracle(n)(state)
    dp = exact_dp_oracle(n)(state)
    assert np.allclose(enum, dp, atol=1e-12)
    truth = exact_correlations(lbf_fn(lbf_from_state(state)), n)
    assert np.allclose(enum, truth, atol=1e-12)


def test_sampled_oracle_is_within_contract():
    n = 5
    xi = 0.4
    state = BoostState(n=n, gamma=xi / 2.0)
    _append(state, 1, 1)
    _append(state, 2, 1)
    exact = exact_enum_oracle(n)(state)
    est = sampled_oracle(n, xi, 1e-3, seed=0)(state)
    assert np.abs(est - exact).max() <= xi / 16.0


def test_boost_with_sampled_oracle_still_converges(rng):
    targets = _realizable_targets(rng, 4, xi=0.2)
    res = boost(targets, sampled_oracle(4, 0.2, 1e-4, seed=1))
    assert res.converged
    exact = exact_correlations(lbf_fn(lbf_from_state(res.state)), 4)
    # stop rule sees estimates, so allow the oracle slack on top of gamma
    assert np.abs(targets.a - exact).max() <= targets.gamma + 0.2 / 16.0


def test_targets_validation():
    with pytest.raises(ValueError):
        BoostTargets(a=np.zeros(3), xi=0.0)
    with pytest.raises(ValueError):
        BoostTargets(a=np.zeros((2, 2)), xi=0.1)
