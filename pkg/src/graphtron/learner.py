"""The gap-based feedback-graph learner.

Each round: compute the max-margin action ``y_star``; set an exploration
rate ``gamma_t`` (zero when ``y_star`` is revealing, otherwise decaying
with the number of non-revealing rounds so far); mix the point mass on
``y_star`` with either uniform exploration weighted by the gap value or
dominating-set exploration weighted by ``gamma_t``; sample a prediction;
importance-weight the observed loss by the inverse observation
probability and hand the estimated gradient to the OCO core.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import losses
from .feedback_graph import FeedbackGraph, GraphSummary, summarize
from .losses import SurrogateLossSpec
from .oco import OcoState, oco_init, oco_update

TUNING_PRESETS = ("unit", "theory-expectation", "theory-hp")


@dataclass
class PredictionOutcome:
    p_prime: np.ndarray
    y_star: int
    a_t: float
    gamma_t: float
    zeta_t: int


@dataclass
class RoundRecord:
    t: int
    y_star: int
    a_t: float
    gamma_t: float
    zeta_t: int
    y_prime: int
    mistake: int
    observed: int
    v_t: float
    surrogate_at_w: float


@dataclass
class GappletronState:
    oco: OcoState
    graph: FeedbackGraph
    summary: GraphSummary
    loss: SurrogateLossSpec
    gamma: float
    explore_count: int = 0
    t: int = 0
    dominating: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        self.dominating = np.array(sorted(self.summary.dominating_set), dtype=int)


def init_state(
    graph: FeedbackGraph,
    loss: SurrogateLossSpec,
    dim: int,
    gamma: float,
    radius: float | None = None,
) -> GappletronState:
    return GappletronState(
        oco=oco_init(graph.n_actions, dim, radius=radius),
        graph=graph,
        summary=summarize(graph),
        loss=loss,
        gamma=gamma,
    )


def predict_distribution(state: GappletronState, x: np.ndarray) -> PredictionOutcome:
    """Advance one round and build the prediction distribution.

    Increments the round counter and, when ``y_star`` is not revealing,
    the exploration counter (the counter includes the current round).
    """
    state.t += 1
    k = state.graph.n_actions
    score = state.oco.w @ x
    y_star = int(np.argmax(score))
    a_t = losses.gap_value_from_scores(state.loss, score)
    if y_star in state.summary.revealing_set:
        gamma_t = 0.0
    else:
        state.explore_count += 1
        gamma_t = min(0.5, state.gamma / np.sqrt(state.explore_count))
    zeta_t = 1 if gamma_t <= a_t else 0

    p = np.zeros(k)
    if zeta_t:
        p += a_t / k
        p[y_star] += 1.0 - a_t
    else:
        rho = state.summary.domination_number_bound
        p[state.dominating] += gamma_t / rho
        p[y_star] += 1.0 - gamma_t
    return PredictionOutcome(p_prime=p, y_star=y_star, a_t=a_t, gamma_t=gamma_t, zeta_t=zeta_t)


def sample_action(p_prime: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF sampling."""
    cdf = np.cumsum(p_prime)
    return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right").clip(0, len(p_prime) - 1))


def observation_probability(
    p_prime: np.ndarray, graph: FeedbackGraph, y_true: int
) -> float:
    """Probability that the sampled prediction observes ``y_true``."""
    return float(
        sum(
            p_prime[y_prime]
            for y_prime in range(graph.n_actions)
            if y_true in graph.out_neighborhoods[y_prime]
        )
    )


def identify_label(
    graph: FeedbackGraph, y_prime: int, feedback: Iterable[tuple[int, int]]
) -> int | None:
    """Recover the true label from the feedback set, if it was observed.

    The feedback is the set of pairs ``(y, 1[y != y_t])`` over
    ``out(y_prime)``; the label is identified exactly when some pair
    carries indicator 0.
    """
    out = graph.out_neighborhoods[y_prime]
    identified = None
    for y, indicator in feedback:
        if y not in out:
            raise ValueError(
                f"feedback references action {y} outside out({y_prime})"
            )
        if indicator == 0:
            identified = y
    return identified


def update(
    state: GappletronState,
    x: np.ndarray,
    outcome: PredictionOutcome,
    y_prime: int,
    feedback: Sequence[tuple[int, int]],
) -> RoundRecord:
    """Importance-weighted loss estimate and OCO step; returns the round trace."""
    y_true = identify_label(state.graph, y_prime, feedback)
    if y_true is None:
        v_t = 0.0
        surrogate = 0.0
        observed = 0
        oco_update(state.oco, np.zeros_like(state.oco.w))
    else:
        prob = observation_probability(outcome.p_prime, state.graph, y_true)
        v_t = 1.0 / prob
        surrogate = losses.loss_value(state.loss, state.oco.w, x, y_true)
        g_hat = v_t * losses.loss_gradient(state.loss, state.oco.w, x, y_true)
        observed = 1
        oco_update(state.oco, g_hat)
    return RoundRecord(
        t=state.t,
        y_star=outcome.y_star,
        a_t=outcome.a_t,
        gamma_t=outcome.gamma_t,
        zeta_t=outcome.zeta_t,
        y_prime=y_prime,
        mistake=-1,  # filled by the protocol, which knows y_t
        observed=observed,
        v_t=v_t,
        surrogate_at_w=surrogate,
    )


def mistake_bound_factor(loss: SurrogateLossSpec, n_actions: int) -> float:
    """Per-round multiplier on the surrogate in the expected-mistake bound."""
    base = (n_actions - 1) / n_actions
    if loss.kind == "hinge":
        return max(2.0 / 3.0, base)
    return base


def theory_gamma(
    preset: str,
    radius: float,
    smoothness_bound: float,
    rho: int,
    n_actions: int,
    delta: float = 0.05,
    ell_max: float = 1.0,
) -> float:
    """Exploration parameter from the tuning presets.

    ``unit`` sets every parameter to 1.  ``theory-expectation`` is
    ``B/2 * sqrt(K rho L)``.  ``theory-hp`` is
    ``sqrt(K rho (L B^2 + 5 ell_max ln(2/delta)))``.
    """
    if preset == "unit":
        return 1.0
    if preset == "theory-expectation":
        return 0.5 * radius * np.sqrt(n_actions * rho * smoothness_bound)
    if preset == "theory-hp":
        return float(
            np.sqrt(
                n_actions
                * rho
                * (smoothness_bound * radius**2 + 5.0 * ell_max * np.log(2.0 / delta))
            )
        )
    raise ValueError(
        f"unknown tuning preset {preset!r}; valid: {', '.join(TUNING_PRESETS)}"
    )
