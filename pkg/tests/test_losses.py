import numpy as np
import pytest

from graphtron import losses
from graphtron.losses import check_regularity, gap_value, loss_gradient, loss_value, make_loss


def test_make_loss_aliases_and_errors():
    assert make_loss("logistic").kind == "logistic_baseK"
    assert make_loss("smooth-hinge").kind == "smooth_hinge"
    assert make_loss("hinge", kappa=0.25).kappa == 0.25
    with pytest.raises(ValueError, match="unknown loss"):
        make_loss("l2")
    with pytest.raises(ValueError):
        make_loss("hinge", kappa=1.5)


def test_loss_value_at_zero_weights():
    x = np.array([1.0, -2.0, 0.5])
    for name in ("logistic", "smooth-hinge", "hinge"):
        w = np.zeros((4, 3))
        # uniform scores: logistic gives -log_K(1/K) = 1, the margin losses
        # sit at their m = 0 boundary, also 1
        assert loss_value(make_loss(name), w, x, 2) == pytest.approx(1.0, abs=1e-12)


def test_loss_value_rejects_bad_label():
    spec = make_loss("smooth-hinge")
    with pytest.raises(ValueError, match="label"):
        loss_value(spec, np.zeros((3, 2)), np.ones(2), 3)


def test_smooth_hinge_pieces():
    spec = make_loss("smooth-hinge")
    x = np.array([1.0])
    # margin m = w[y] - w[other]
    assert loss_value(spec, np.array([[-1.0], [0.0]]), x, 0) == pytest.approx(3.0)
    assert loss_value(spec, np.array([[0.5], [0.0]]), x, 0) == pytest.approx(0.25)
    assert loss_value(spec, np.array([[2.0], [0.0]]), x, 0) == 0.0


def test_hinge_dead_zone():
    spec = make_loss("hinge", kappa=0.5)
    x = np.array([1.0])
    # y_star = y and m_star >= kappa: dead zone, loss 0 even though m < 1
    assert loss_value(spec, np.array([[0.6], [0.0]]), x, 0) == 0.0
    # same margin, wrong label: plain hinge
    assert loss_value(spec, np.array([[0.6], [0.0]]), x, 1) == pytest.approx(1.6)
    # below kappa: plain hinge even at the argmax
    assert loss_value(spec, np.array([[0.3], [0.0]]), x, 0) == pytest.approx(0.7)


def test_logistic_gradient_at_zero_weights():
    k, d = 4, 3
    spec = make_loss("logistic")
    x = np.array([1.0, -2.0, 0.5])
    grad = loss_gradient(spec, np.zeros((k, d)), x, 1)
    coeff = np.full(k, 1.0 / k)
    coeff[1] -= 1.0
    expected = np.outer(coeff / np.log(k), x)
    np.testing.assert_allclose(grad, expected, atol=1e-12)


def test_smooth_hinge_gradient_zero_beyond_margin_one():
    spec = make_loss("smooth-hinge")
    grad = loss_gradient(spec, np.array([[2.0], [0.0]]), np.array([1.0]), 0)
    assert np.all(grad == 0.0)


def test_hinge_gradient_rows():
    spec = make_loss("hinge")
    x = np.array([1.0, 2.0])
    w = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
    grad = loss_gradient(spec, w, x, 0)
    np.testing.assert_allclose(grad[0], -x)
    np.testing.assert_allclose(grad[1], x)
    np.testing.assert_allclose(grad[2], 0.0)


def _fd_gradient(spec, w, x, y, step=1e-6):
    grad = np.zeros_like(w)
    for i in range(w.shape[0]):
        for j in range(w.shape[1]):
            wp, wm = w.copy(), w.copy()
            wp[i, j] += step
            wm[i, j] -= step
            grad[i, j] = (loss_value(spec, wp, x, y) - loss_value(spec, wm, x, y)) / (2 * step)
    return grad


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    for name in ("logistic", "smooth-hinge"):
        spec = make_loss(name)
        for _ in range(50):
            w = rng.standard_normal((5, 7))
            x = rng.standard_normal(7)
            y = int(rng.integers(5))
            numeric = _fd_gradient(spec, w, x, y)
            analytic = loss_gradient(spec, w, x, y)
            scale = max(np.linalg.norm(numeric), 1e-8)
            assert np.linalg.norm(analytic - numeric) / scale <= 1e-5


def test_gap_value_examples():
    x = np.array([1.0])
    assert gap_value(make_loss("logistic"), np.zeros((3, 1)), x) == pytest.approx(1.0)
    assert gap_value(make_loss("hinge"), np.array([[0.6], [0.0]]), x) == 0.0
    assert gap_value(make_loss("smooth-hinge"), np.array([[2.0], [0.0]]), x) == 0.0


def test_gap_value_stays_in_unit_interval():
    rng = np.random.default_rng(4)
    for name in ("logistic", "smooth-hinge", "hinge"):
        spec = make_loss(name)
        for _ in range(10_000):
            w = rng.standard_normal((4, 5)) * rng.choice([0.1, 1.0, 10.0])
            x = rng.standard_normal(5)
            assert 0.0 <= gap_value(spec, w, x) <= 1.0


def test_convexity_spot_check():
    rng = np.random.default_rng(5)
    for name in ("logistic", "smooth-hinge", "hinge"):
        spec = make_loss(name, kappa=1.0 if name == "hinge" else 0.5)
        for _ in range(300):
            w1 = rng.standard_normal((4, 6))
            w2 = rng.standard_normal((4, 6))
            x = rng.standard_normal(6)
            y = int(rng.integers(4))
            lam = float(rng.random())
            mid = loss_value(spec, lam * w1 + (1 - lam) * w2, x, y)
            assert mid <= lam * loss_value(spec, w1, x, y) + (
                1 - lam
            ) * loss_value(spec, w2, x, y) + 1e-9


def test_smooth_hinge_slope_identity():
    # on the quadratic piece the squared slope equals four times the value
    for m in np.linspace(0.01, 0.99, 25):
        value = losses._smooth_hinge_value(float(m))
        slope = losses._smooth_hinge_slope(float(m))
        assert slope * slope == pytest.approx(4.0 * value, rel=1e-12)


def test_smoothness_constants():
    x = np.array([1.0, 2.0])  # squared norm 5
    assert make_loss("logistic").smoothness(x, 4) == pytest.approx(5.0 / np.log(4))
    assert make_loss("smooth-hinge").smoothness(x, 4) == pytest.approx(20.0)
    assert make_loss("hinge").smoothness(x, 4) == pytest.approx(10.0)


def test_check_regularity_clean_cases():
    rng = np.random.default_rng(6)
    rep = check_regularity(make_loss("smooth-hinge"), 6, 10, 2000, rng)
    assert rep.wrong_right_violation_rate == 0.0
    assert rep.self_bound_violation_rate == 0.0
    rep = check_regularity(make_loss("hinge"), 6, 10, 2000, rng)
    assert rep.self_bound_violation_rate == 0.0
    rep = check_regularity(make_loss("logistic"), 2, 10, 2000, rng)
    assert rep.wrong_right_violation_rate == 0.0
    assert rep.self_bound_violation_rate == 0.0


def test_check_regularity_rejects_empty_sample():
    with pytest.raises(ValueError):
        check_regularity(make_loss("hinge"), 3, 4, 0, np.random.default_rng(0))


def test_batch_loss_matches_scalar_loss():
    rng = np.random.default_rng(7)
    xs = rng.standard_normal((40, 6))
    ys = rng.integers(0, 5, size=40)
    w = rng.standard_normal((5, 6))
    for name in ("logistic", "smooth-hinge", "hinge"):
        spec = make_loss(name)
        batch = losses.batch_loss(spec, w, xs, ys)
        for t in range(40):
            assert batch[t] == pytest.approx(loss_value(spec, w, xs[t], int(ys[t])))


def test_batch_gradient_matches_scalar_sum():
    rng = np.random.default_rng(8)
    xs = rng.standard_normal((30, 6))
    ys = rng.integers(0, 5, size=30)
    w = rng.standard_normal((5, 6))
    for name in ("logistic", "smooth-hinge", "hinge"):
        spec = make_loss(name)
        batch = losses.batch_loss_gradient(spec, w, xs, ys)
        total = sum(loss_gradient(spec, w, xs[t], int(ys[t])) for t in range(30))
        np.testing.assert_allclose(batch, total, atol=1e-10)
