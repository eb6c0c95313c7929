"""Comparison learners: multiclass Perceptron, its passive-aggressive
variant (both full information), and an importance-weighted Banditron
for the bandit and spam-filtering graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feedback_graph import FeedbackGraph, revealing_set

BASELINE_KINDS = ("perceptron", "passive_aggressive", "banditron_iw")


@dataclass
class BaselineState:
    w: np.ndarray  # (K, d)
    kind: str
    explore: float = 0.5

    def __post_init__(self):
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        if not 0.0 < self.explore <= 1.0:
            raise ValueError("explore must lie in (0, 1]")


def init_baseline(kind: str, n_actions: int, dim: int, explore: float = 0.5) -> BaselineState:
    return BaselineState(w=np.zeros((n_actions, dim)), kind=kind, explore=explore)


def _argmax(score: np.ndarray) -> int:
    return int(np.argmax(score))


def _runner_up(score: np.ndarray, y: int) -> int:
    masked = score.copy()
    masked[y] = -np.inf
    return int(np.argmax(masked))


def _hinge_and_rows(w: np.ndarray, x: np.ndarray, y_true: int) -> tuple[float, int]:
    """Standard multiclass hinge max{1 - m(W, y), 0} and the competing row."""
    score = w @ x
    k = _runner_up(score, y_true)
    m = float(score[y_true] - score[k])
    return max(1.0 - m, 0.0), k


def perceptron_step(state: BaselineState, x: np.ndarray, y_true: int) -> int:
    """Predict by argmax; on mistake move the true row toward x and the
    predicted row away.  Returns the prediction; mutates the state."""
    score = state.w @ x
    pred = _argmax(score)
    if pred != y_true:
        state.w[y_true] += x
        state.w[pred] -= x
    return pred


def pa_step(state: BaselineState, x: np.ndarray, y_true: int) -> int:
    """Passive-aggressive step: scale the Perceptron-style update so the
    hinge loss at (x, y_true) is annihilated."""
    score = state.w @ x
    pred = _argmax(score)
    loss, k = _hinge_and_rows(state.w, x, y_true)
    sq = float(np.dot(x, x))
    if loss > 0.0 and sq > 0.0:
        tau = loss / (2.0 * sq)
        state.w[y_true] += tau * x
        state.w[k] -= tau * x
    return pred


def pa_step_update_only(state: BaselineState, x: np.ndarray, y_true: int) -> None:
    """Passive-aggressive update without producing a prediction."""
    loss, k = _hinge_and_rows(state.w, x, y_true)
    sq = float(np.dot(x, x))
    if loss > 0.0 and sq > 0.0:
        tau = loss / (2.0 * sq)
        state.w[y_true] += tau * x
        state.w[k] -= tau * x


def banditron_support(graph: FeedbackGraph) -> np.ndarray:
    """Exploration support: all actions in a bandit graph, the revealing
    actions in a spam-filtering graph."""
    k = graph.n_actions
    if graph.label_actions != frozenset(range(k)):
        # rules out label-efficient graphs, whose query node is not a label
        raise ValueError("Banditron requires a bandit or spam-filtering graph")
    revealing = revealing_set(graph)
    if not revealing:
        if all(graph.out_neighborhoods[y] == {y} for y in range(k)):
            return np.arange(k)
        raise ValueError("Banditron requires a bandit or spam-filtering graph")
    blind_ok = all(
        not graph.out_neighborhoods[y] for y in range(k) if y not in revealing
    )
    if not blind_ok:
        raise ValueError("Banditron requires a bandit or spam-filtering graph")
    return np.array(sorted(revealing), dtype=int)


def banditron_distribution(
    state: BaselineState, x: np.ndarray, support: np.ndarray
) -> tuple[np.ndarray, int]:
    score = state.w @ x
    y_star = _argmax(score)
    p = np.zeros(state.w.shape[0])
    p[support] += state.explore / len(support)
    p[y_star] += 1.0 - state.explore
    return p, y_star


def banditron_observe(
    state: BaselineState,
    x: np.ndarray,
    p: np.ndarray,
    graph: FeedbackGraph,
    y_true: int,
) -> None:
    """Importance-weighted hinge-gradient update after observing y_true."""
    prob = sum(
        float(p[yp])
        for yp in range(graph.n_actions)
        if y_true in graph.out_neighborhoods[yp]
    )
    loss, k = _hinge_and_rows(state.w, x, y_true)
    if loss > 0.0:
        weight = 1.0 / prob
        state.w[y_true] += weight * x
        state.w[k] -= weight * x


def banditron_iw_step(
    state: BaselineState,
    x: np.ndarray,
    y_true: int,
    graph: FeedbackGraph,
    rng: np.random.Generator,
) -> int:
    """Sample a prediction, then update if the label was observed."""
    support = banditron_support(graph)
    p, _ = banditron_distribution(state, x, support)
    y_prime = int(rng.choice(graph.n_actions, p=p / p.sum()))
    if y_true in graph.out_neighborhoods[y_prime]:
        banditron_observe(state, x, p, graph, y_true)
    return y_prime


def banditron_theory_explore(
    x_norm_bound: float, horizon: int, printed_max: bool = False
) -> float:
    """Horizon-based exploration rate ``(X^2 / T)^(1/3)``, capped at 1/2.

    The cap is ``min`` by default; ``printed_max=True`` switches to taking
    the max instead, which keeps the rate at least 1/2 for any horizon.
    """
    base = (x_norm_bound**2 / horizon) ** (1.0 / 3.0)
    rate = max(0.5, base) if printed_max else min(0.5, base)
    return min(max(rate, 1e-12), 1.0)
