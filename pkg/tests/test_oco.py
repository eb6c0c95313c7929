import numpy as np
import pytest

from graphtron.oco import oco_init, oco_update


def test_init_zero_matrix():
    state = oco_init(2, 3)
    assert state.w.shape == (2, 3)
    assert np.all(state.w == 0.0)
    assert state.grad_sq_sum == 0.0
    assert state.radius is None


def test_init_projected_mode_starts_inside_ball():
    state = oco_init(6, 80, radius=1.0)
    assert np.linalg.norm(state.w) <= 1.0
    with pytest.raises(ValueError):
        oco_init(6, 80, radius=0.0)
    with pytest.raises(ValueError):
        oco_init(0, 3)


def test_zero_gradient_is_a_no_op():
    state = oco_init(2, 2)
    oco_update(state, np.zeros((2, 2)))
    assert np.all(state.w == 0.0)
    assert state.grad_sq_sum == 0.0


def test_first_update_formula():
    state = oco_init(2, 2)
    g = np.array([[1.0, 2.0], [0.0, -1.0]])
    oco_update(state, g)
    sq = float((g * g).sum())
    np.testing.assert_allclose(state.w, -g / np.sqrt(1e-8 + sq))
    assert state.grad_sq_sum == pytest.approx(sq)


def test_projection_rescales_to_radius():
    state = oco_init(2, 2, radius=1.0)
    oco_update(state, np.full((2, 2), 1e6))
    assert np.linalg.norm(state.w) == pytest.approx(1.0)


def test_rejects_non_finite_gradient():
    state = oco_init(2, 2)
    g = np.zeros((2, 2))
    g[0, 0] = np.nan
    with pytest.raises(ValueError, match="finite"):
        oco_update(state, g)


def test_determinism():
    rng = np.random.default_rng(0)
    grads = [rng.standard_normal((3, 4)) for _ in range(100)]
    a = oco_init(3, 4)
    b = oco_init(3, 4)
    for g in grads:
        oco_update(a, g)
        oco_update(b, g)
    assert np.array_equal(a.w, b.w)


def test_regret_per_round_shrinks_on_quadratics():
    # losses l_t(W) = 0.5 * ||W - Z_t||^2 with bounded random targets;
    # the per-round regret against the empirical mean should drop by half
    rng = np.random.default_rng(1)
    horizon = 10_000
    targets = rng.uniform(-1.0, 1.0, size=(horizon, 2, 3))
    u = targets.mean(axis=0)
    state = oco_init(2, 3)
    regrets = []
    for z in targets:
        diff_w = state.w - z
        regrets.append(0.5 * float((diff_w * diff_w).sum()) - 0.5 * float(((u - z) ** 2).sum()))
        oco_update(state, diff_w)
    half = horizon // 2
    first = sum(regrets[:half]) / half
    second = sum(regrets[half:]) / (horizon - half)
    assert second < first
