"""Surrogate losses on linear multiclass predictors.

A loss is evaluated at a weight matrix ``W`` (one row per action), a
feature vector ``x``, and a label ``y``.  Three losses are provided:

* ``logistic_baseK``: cross-entropy in base K, ``-log_K softmax_y(Wx)``.
* ``smooth_hinge``: a piecewise-quadratic margin loss, scaled so that both
  the wrong-plus-right condition and the self-bounding gradient condition
  hold (the common half-quadratic form fails the former at margin ties).
* ``hinge``: the margin hinge with a dead zone controlled by ``kappa``;
  its gradient self-bound holds with constant ``4 * ||x||^2``.

All argmax ties break toward the lowest index so that runs are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOSS_KINDS = ("logistic_baseK", "smooth_hinge", "hinge")

LOSS_ALIASES = {
    "logistic": "logistic_baseK",
    "logistic_baseK": "logistic_baseK",
    "smooth-hinge": "smooth_hinge",
    "smooth_hinge": "smooth_hinge",
    "hinge": "hinge",
}


@dataclass(frozen=True)
class SurrogateLossSpec:
    kind: str
    kappa: float = 0.5

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(
                f"unknown loss kind {self.kind!r}; valid: {', '.join(LOSS_KINDS)}"
            )
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")

    def smoothness(self, x: np.ndarray, n_actions: int) -> float:
        """Constant L such that ||grad loss||^2 <= 2 L loss at every point."""
        sq = float(np.dot(x, x))
        if self.kind == "logistic_baseK":
            return sq / np.log(n_actions)
        if self.kind == "smooth_hinge":
            return 4.0 * sq
        return 2.0 * sq  # hinge: the self-bound 4||x||^2 loss equals 2L loss


def make_loss(name: str, kappa: float = 0.5) -> SurrogateLossSpec:
    kind = LOSS_ALIASES.get(name)
    if kind is None:
        raise ValueError(
            f"unknown loss {name!r}; valid: {', '.join(sorted(LOSS_ALIASES))}"
        )
    return SurrogateLossSpec(kind=kind, kappa=kappa)


def scores(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    return w @ x


def argmax_action(score: np.ndarray) -> int:
    # np.argmax already returns the first (lowest-index) maximizer.
    return int(np.argmax(score))


def margin(score: np.ndarray, y: int) -> float:
    """m(W, y) = <W^y, x> - max_{k != y} <W^k, x>, computed from scores."""
    other = np.delete(score, y)
    return float(score[y] - other.max())


def _runner_up(score: np.ndarray, y: int) -> int:
    """argmax_{k != y} score[k], lowest index on ties."""
    masked = score.copy()
    masked[y] = -np.inf
    return int(np.argmax(masked))


def _smooth_hinge_value(m: float) -> float:
    if m <= 0.0:
        return 1.0 - 2.0 * m
    if m < 1.0:
        return (1.0 - m) ** 2
    return 0.0


def _smooth_hinge_slope(m: float) -> float:
    if m <= 0.0:
        return -2.0
    if m < 1.0:
        return -2.0 * (1.0 - m)
    return 0.0


def _check_label(y: int, n_actions: int) -> None:
    if not 0 <= y < n_actions:
        raise ValueError(f"label {y} outside 0..{n_actions - 1}")


def loss_value_from_scores(
    spec: SurrogateLossSpec, score: np.ndarray, y: int
) -> float:
    n_actions = score.shape[0]
    _check_label(y, n_actions)
    if spec.kind == "logistic_baseK":
        shifted = score - score.max()
        logsumexp = np.log(np.exp(shifted).sum())
        return float((logsumexp - shifted[y]) / np.log(n_actions))
    m = margin(score, y)
    if spec.kind == "smooth_hinge":
        return _smooth_hinge_value(m)
    # hinge
    y_star = argmax_action(score)
    m_star = margin(score, y_star)
    if y_star == y and m_star >= spec.kappa:
        return 0.0
    return max(1.0 - m, 0.0)


def loss_value(
    spec: SurrogateLossSpec, w: np.ndarray, x: np.ndarray, y: int
) -> float:
    return loss_value_from_scores(spec, scores(w, x), y)


def loss_gradient_from_scores(
    spec: SurrogateLossSpec, score: np.ndarray, x: np.ndarray, y: int
) -> np.ndarray:
    n_actions = score.shape[0]
    _check_label(y, n_actions)
    grad = np.zeros((n_actions, x.shape[0]))
    if spec.kind == "logistic_baseK":
        shifted = score - score.max()
        q = np.exp(shifted)
        q /= q.sum()
        coeff = q.copy()
        coeff[y] -= 1.0
        coeff /= np.log(n_actions)
        return np.outer(coeff, x)
    if spec.kind == "smooth_hinge":
        m = margin(score, y)
        slope = _smooth_hinge_slope(m)
        if slope != 0.0:
            k = _runner_up(score, y)
            grad[y] = slope * x
            grad[k] = -slope * x
        return grad
    # hinge: subgradient; zero at kinks and wherever the value is zero
    if loss_value_from_scores(spec, score, y) > 0.0:
        k = _runner_up(score, y)
        grad[y] = -x
        grad[k] = x
    return grad


def loss_gradient(
    spec: SurrogateLossSpec, w: np.ndarray, x: np.ndarray, y: int
) -> np.ndarray:
    return loss_gradient_from_scores(spec, scores(w, x), x, y)


def gap_value_from_scores(spec: SurrogateLossSpec, score: np.ndarray) -> float:
    """Loss at the argmax action, clamped into [0, 1] (clamp is defensive:
    at the argmax the margin is nonnegative and all three losses stay in
    [0, 1] there)."""
    y_star = argmax_action(score)
    return min(max(loss_value_from_scores(spec, score, y_star), 0.0), 1.0)


def gap_value(spec: SurrogateLossSpec, w: np.ndarray, x: np.ndarray) -> float:
    return gap_value_from_scores(spec, scores(w, x))


# ---------------------------------------------------------------------------
# Batch (vectorized) evaluation, used by the offline comparator.


def batch_loss(
    spec: SurrogateLossSpec, w: np.ndarray, xs: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Per-example losses for a whole dataset; xs is (T, d), ys is (T,)."""
    t = xs.shape[0]
    score = xs @ w.T  # (T, K)
    n_actions = w.shape[0]
    idx = np.arange(t)
    if spec.kind == "logistic_baseK":
        shifted = score - score.max(axis=1, keepdims=True)
        logsumexp = np.log(np.exp(shifted).sum(axis=1))
        return (logsumexp - shifted[idx, ys]) / np.log(n_actions)
    masked = score.copy()
    masked[idx, ys] = -np.inf
    m = score[idx, ys] - masked.max(axis=1)
    if spec.kind == "smooth_hinge":
        vals = np.where(
            m <= 0.0, 1.0 - 2.0 * m, np.where(m < 1.0, (1.0 - m) ** 2, 0.0)
        )
        return vals
    # hinge
    y_star = score.argmax(axis=1)
    m_star = score.max(axis=1) - masked_max_excluding(score, y_star)
    vals = np.maximum(1.0 - m, 0.0)
    dead = (y_star == ys) & (m_star >= spec.kappa)
    vals[dead] = 0.0
    return vals


def masked_max_excluding(score: np.ndarray, excl: np.ndarray) -> np.ndarray:
    masked = score.copy()
    masked[np.arange(score.shape[0]), excl] = -np.inf
    return masked.max(axis=1)


def batch_loss_gradient(
    spec: SurrogateLossSpec, w: np.ndarray, xs: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Sum over the batch of per-example loss (sub)gradients; shape (K, d)."""
    t = xs.shape[0]
    n_actions = w.shape[0]
    score = xs @ w.T
    idx = np.arange(t)
    if spec.kind == "logistic_baseK":
        shifted = score - score.max(axis=1, keepdims=True)
        q = np.exp(shifted)
        q /= q.sum(axis=1, keepdims=True)
        q[idx, ys] -= 1.0
        q /= np.log(n_actions)
        return q.T @ xs
    masked = score.copy()
    masked[idx, ys] = -np.inf
    runner = masked.argmax(axis=1)
    m = score[idx, ys] - masked[idx, runner]
    if spec.kind == "smooth_hinge":
        slope = np.where(m <= 0.0, -2.0, np.where(m < 1.0, -2.0 * (1.0 - m), 0.0))
    else:
        active = batch_loss(spec, w, xs, ys) > 0.0
        slope = np.where(active, -1.0, 0.0)
    coeff = np.zeros((t, n_actions))
    coeff[idx, ys] = slope
    coeff[idx, runner] -= slope
    return coeff.T @ xs


# ---------------------------------------------------------------------------
# Regularity validators.

REG_TOL = 1e-9


@dataclass(frozen=True)
class RegularityReport:
    wrong_right_violation_rate: float
    self_bound_violation_rate: float
    max_self_bound_ratio: float
    n_samples: int


def check_regularity(
    spec: SurrogateLossSpec,
    n_actions: int,
    dim: int,
    n_samples: int,
    rng: np.random.Generator,
) -> RegularityReport:
    """Sample random (W, x, y != y_star) triples and count violations of the
    wrong-plus-right condition and the gradient self-bound.

    The wrong-plus-right condition:
        (K-1)/K * loss(W,x,y) + 1/K * loss(W,x,y_star) >= 1.
    The gradient self-bound:
        ||grad loss(W,x,y)||_F^2 <= 2 * L(x) * loss(W,x,y).
    Both checked with absolute tolerance 1e-9.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    wrong_right_bad = 0
    self_bound_bad = 0
    max_ratio = 0.0
    for _ in range(n_samples):
        w = rng.standard_normal((n_actions, dim))
        x = rng.standard_normal(dim)
        score = scores(w, x)
        y_star = argmax_action(score)
        others = [k for k in range(n_actions) if k != y_star]
        y = others[rng.integers(len(others))]

        val_y = loss_value_from_scores(spec, score, y)
        val_star = loss_value_from_scores(spec, score, y_star)
        lhs = (n_actions - 1) / n_actions * val_y + val_star / n_actions
        if lhs < 1.0 - REG_TOL:
            wrong_right_bad += 1

        grad = loss_gradient_from_scores(spec, score, x, y)
        grad_sq = float((grad * grad).sum())
        bound = 2.0 * spec.smoothness(x, n_actions) * val_y
        if grad_sq > bound + REG_TOL:
            self_bound_bad += 1
        if bound > 0.0:
            max_ratio = max(max_ratio, grad_sq / bound)
    return RegularityReport(
        wrong_right_violation_rate=wrong_right_bad / n_samples,
        self_bound_violation_rate=self_bound_bad / n_samples,
        max_self_bound_ratio=max_ratio,
        n_samples=n_samples,
    )
