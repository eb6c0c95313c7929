import numpy as np
import pytest

from graphtron import baselines
from graphtron.baselines import (
    banditron_distribution,
    banditron_iw_step,
    banditron_observe,
    banditron_support,
    banditron_theory_explore,
    init_baseline,
    pa_step,
    perceptron_step,
)
from graphtron.environments import SynthConfig, SynthStream, make_run_rngs
from graphtron.feedback_graph import make_standard


def test_init_baseline_validates_kind_and_explore():
    state = init_baseline("perceptron", 3, 4)
    assert state.w.shape == (3, 4)
    with pytest.raises(ValueError):
        init_baseline("adagrad", 3, 4)
    with pytest.raises(ValueError):
        init_baseline("banditron_iw", 3, 4, explore=0.0)


def test_perceptron_predicts_lowest_index_at_zero_weights():
    state = init_baseline("perceptron", 4, 2)
    pred = perceptron_step(state, np.array([1.0, 0.0]), y_true=2)
    assert pred == 0
    np.testing.assert_allclose(state.w[2], [1.0, 0.0])
    np.testing.assert_allclose(state.w[0], [-1.0, 0.0])


def test_perceptron_conservative_on_correct_prediction():
    state = init_baseline("perceptron", 3, 2)
    state.w[1] = np.array([5.0, 0.0])
    before = state.w.copy()
    pred = perceptron_step(state, np.array([1.0, 0.0]), y_true=1)
    assert pred == 1
    assert np.array_equal(state.w, before)


def test_pa_passive_when_hinge_is_zero():
    state = init_baseline("passive_aggressive", 3, 2)
    state.w[1] = np.array([5.0, 0.0])
    before = state.w.copy()
    pa_step(state, np.array([1.0, 0.0]), y_true=1)
    assert np.array_equal(state.w, before)


def test_pa_tau_formula_at_zero_weights():
    state = init_baseline("passive_aggressive", 3, 2)
    x = np.array([1.0, 1.0])  # squared norm 2, hinge loss 1 at W = 0
    pa_step(state, x, y_true=2)
    np.testing.assert_allclose(state.w[2], 0.25 * x)


def test_pa_annihilates_hinge_against_targeted_row():
    # the aggressive step zeroes the margin violation against the row it
    # pushed away (another row can become the new runner-up)
    rng = np.random.default_rng(0)
    state = init_baseline("passive_aggressive", 4, 5)
    for _ in range(50):
        x = rng.standard_normal(5)
        y = int(rng.integers(4))
        _, k = baselines._hinge_and_rows(state.w, x, y)
        pa_step(state, x, y)
        score = state.w @ x
        assert max(1.0 - float(score[y] - score[k]), 0.0) == pytest.approx(0.0, abs=1e-9)


def _separable_mistakes(kind: str) -> tuple[int, int]:
    config = SynthConfig(n_classes=6, d_prime=2, noise=0.0, seed=0)
    env_rng, _ = make_run_rngs(0, 0)
    stream = SynthStream(config, env_rng)
    state = init_baseline(kind, 6, config.dim)
    step = perceptron_step if kind == "perceptron" else pa_step
    halves = [0, 0]
    horizon = 4000
    for t in range(horizon):
        x, y = stream.sample()
        pred = step(state, x, y)
        halves[t >= horizon // 2] += int(pred != y)
    return halves[0], halves[1]


@pytest.mark.parametrize("kind", ["perceptron", "passive_aggressive"])
def test_full_info_baselines_plateau_on_separable_stream(kind):
    first, second = _separable_mistakes(kind)
    assert second <= first


def test_banditron_support_by_graph_kind():
    np.testing.assert_array_equal(banditron_support(make_standard("bandit", 4)), np.arange(4))
    np.testing.assert_array_equal(banditron_support(make_standard("spam-filter", 5)), [0])
    with pytest.raises(ValueError, match="bandit or spam"):
        banditron_support(make_standard("label-efficient", 4))


def test_banditron_uniform_at_full_exploration():
    state = init_baseline("banditron_iw", 4, 2, explore=1.0)
    p, y_star = banditron_distribution(state, np.array([1.0, 0.0]), np.arange(4))
    assert y_star == 0
    np.testing.assert_allclose(p, np.full(4, 0.25))


def test_banditron_unobserved_round_is_a_no_op():
    graph = make_standard("bandit", 3)
    state = init_baseline("banditron_iw", 3, 2, explore=1.0)

    class PointMassRng:
        def choice(self, n, p):
            return 2  # always predicts an action that misses y_true

    before = state.w.copy()
    pred = banditron_iw_step(state, np.array([1.0, 0.0]), 1, graph, PointMassRng())
    assert pred == 2
    assert np.array_equal(state.w, before)


def test_banditron_importance_weight_scales_update():
    graph = make_standard("bandit", 3)
    state = init_baseline("banditron_iw", 3, 2, explore=1.0)
    x = np.array([1.0, 0.0])
    p = np.array([0.5, 0.25, 0.25])
    banditron_observe(state, x, p, graph, y_true=0)
    # observation probability 0.5, so the unit hinge update is doubled
    np.testing.assert_allclose(state.w[0], 2.0 * x)


def test_banditron_expected_update_matches_full_info_gradient():
    # enumerate the sampling distribution on a fixed round: the expected
    # importance-weighted update equals the plain hinge update
    rng = np.random.default_rng(1)
    graph = make_standard("bandit", 4)
    w0 = rng.standard_normal((4, 3)) * 0.1
    x = rng.standard_normal(3)
    y_true = 2
    base = init_baseline("banditron_iw", 4, 3, explore=0.4)
    base.w = w0.copy()
    p, _ = banditron_distribution(base, x, np.arange(4))
    expected = np.zeros_like(w0)
    for y_prime in range(4):
        if y_true in graph.out_neighborhoods[y_prime]:
            trial = init_baseline("banditron_iw", 4, 3, explore=0.4)
            trial.w = w0.copy()
            banditron_observe(trial, x, p, graph, y_true)
            expected += p[y_prime] * (trial.w - w0)
    full = init_baseline("banditron_iw", 4, 3, explore=1.0)
    full.w = w0.copy()
    loss, k = baselines._hinge_and_rows(w0, x, y_true)
    target = np.zeros_like(w0)
    if loss > 0.0:
        target[y_true] += x
        target[k] -= x
    np.testing.assert_allclose(expected, target, atol=1e-12)


def test_banditron_theory_explore_min_and_printed_max():
    # X^2 / T = 40 / 1e5 gives a cube root well below the 1/2 cap
    base = (40.0 / 100_000) ** (1.0 / 3.0)
    assert banditron_theory_explore(np.sqrt(40.0), 100_000) == pytest.approx(base)
    assert banditron_theory_explore(np.sqrt(40.0), 100_000, printed_max=True) == 0.5
    assert banditron_theory_explore(10.0, 10) == 0.5
