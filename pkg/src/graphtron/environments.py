"""Synthetic keyword streams and the round-by-round interaction protocol.

Feature vectors are 0/1 with ``40 * d_prime`` positions: the first
``10 * d_prime`` carry per-class keyword bits, the remaining
``30 * d_prime`` carry unrelated bits of which exactly ``5 * d_prime``
are on per example.  With probability ``noise`` the label is replaced by
a uniformly random class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from . import baselines, learner as gp, losses
from .feedback_graph import FeedbackGraph
from .learner import GappletronState, PredictionOutcome, RoundRecord
from .losses import SurrogateLossSpec


@dataclass(frozen=True)
class SynthConfig:
    n_classes: int
    d_prime: int
    noise: float
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("n_classes must be at least 2")
        if self.d_prime < 1:
            raise ValueError("d_prime must be at least 1")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must lie in [0, 1]")

    @property
    def dim(self) -> int:
        return 40 * self.d_prime


def gen_keywords(config: SynthConfig, rng: np.random.Generator) -> list[np.ndarray]:
    """One keyword bit set per class: a random subset of the first
    ``10 d'`` positions with size uniform in {d', ..., 5 d'}."""
    dp = config.d_prime
    table = []
    for _ in range(config.n_classes):
        size = int(rng.integers(dp, 5 * dp + 1))
        table.append(np.sort(rng.choice(10 * dp, size=size, replace=False)))
    return table


def _sample_with_class(
    config: SynthConfig, keywords: list[np.ndarray], rng: np.random.Generator
) -> tuple[np.ndarray, int, int]:
    """Like :func:`sample_example` but also returns the generating class."""
    c = int(rng.integers(config.n_classes))
    x = np.zeros(config.dim)
    x[keywords[c]] = 1.0
    dp = config.d_prime
    unrelated = 10 * dp + rng.choice(30 * dp, size=5 * dp, replace=False)
    x[unrelated] = 1.0
    y = c
    if config.noise > 0.0 and rng.random() < config.noise:
        y = int(rng.integers(config.n_classes))
    return x, y, c


def sample_example(
    config: SynthConfig, keywords: list[np.ndarray], rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    x, y, _ = _sample_with_class(config, keywords, rng)
    return x, y


class SynthStream:
    """Stateful example stream over a fixed keyword table."""

    def __init__(self, config: SynthConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.keywords = gen_keywords(config, rng)

    def sample(self) -> tuple[np.ndarray, int]:
        return sample_example(self.config, self.keywords, self.rng)

    def realize(self, horizon: int) -> tuple[np.ndarray, np.ndarray]:
        """Materialize the next ``horizon`` examples as arrays."""
        xs = np.empty((horizon, self.config.dim))
        ys = np.empty(horizon, dtype=int)
        for t in range(horizon):
            xs[t], ys[t] = self.sample()
        return xs, ys


def make_run_rngs(master_seed: int, run_index: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent environment and learner streams for one run."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    env_ss, learner_ss = ss.spawn(2)
    return np.random.default_rng(env_ss), np.random.default_rng(learner_ss)


# ---------------------------------------------------------------------------
# Protocol-facing learner adapters.  The protocol never hands the true
# label to a learner; everything flows through the feedback set.


class OnlineLearner(Protocol):
    weights: np.ndarray

    def act(self, x: np.ndarray, rng: np.random.Generator) -> int: ...

    def learn(self, x: np.ndarray, y_prime: int, feedback: list[tuple[int, int]]) -> RoundRecord: ...

    def trace_surrogate(self, x: np.ndarray, y_true: int) -> float: ...


class GappletronLearner:
    def __init__(
        self,
        graph: FeedbackGraph,
        loss: SurrogateLossSpec,
        dim: int,
        gamma: float,
        radius: float | None = None,
    ):
        self.graph = graph
        self.loss = loss
        self.state: GappletronState = gp.init_state(graph, loss, dim, gamma, radius)
        self._outcome: PredictionOutcome | None = None

    @property
    def weights(self) -> np.ndarray:
        return self.state.oco.w

    @property
    def last_outcome(self) -> PredictionOutcome:
        assert self._outcome is not None
        return self._outcome

    def act(self, x: np.ndarray, rng: np.random.Generator) -> int:
        self._outcome = gp.predict_distribution(self.state, x)
        return gp.sample_action(self._outcome.p_prime, rng)

    def learn(self, x: np.ndarray, y_prime: int, feedback: list[tuple[int, int]]) -> RoundRecord:
        assert self._outcome is not None
        return gp.update(self.state, x, self._outcome, y_prime, feedback)

    def trace_surrogate(self, x: np.ndarray, y_true: int) -> float:
        return losses.loss_value(self.loss, self.state.oco.w, x, y_true)


class FullInfoBaselineLearner:
    """Perceptron or passive-aggressive; requires full-information feedback."""

    def __init__(self, kind: str, graph: FeedbackGraph, dim: int):
        if kind not in ("perceptron", "passive_aggressive"):
            raise ValueError(f"not a full-information baseline: {kind!r}")
        full = frozenset(range(graph.n_actions))
        if any(out != full for out in graph.out_neighborhoods):
            raise ValueError(f"{kind} requires the full-information graph")
        self.kind = kind
        self.graph = graph
        self.state = baselines.init_baseline(kind, graph.n_actions, dim)
        self._t = 0

    @property
    def weights(self) -> np.ndarray:
        return self.state.w

    def act(self, x: np.ndarray, rng: np.random.Generator) -> int:
        return int(np.argmax(self.state.w @ x))

    def learn(self, x: np.ndarray, y_prime: int, feedback: list[tuple[int, int]]) -> RoundRecord:
        self._t += 1
        y_true = next(y for y, ind in feedback if ind == 0)
        if self.kind == "perceptron":
            if y_prime != y_true:
                self.state.w[y_true] += x
                self.state.w[y_prime] -= x
        else:
            baselines.pa_step_update_only(self.state, x, y_true)
        return RoundRecord(
            t=self._t, y_star=y_prime, a_t=0.0, gamma_t=0.0, zeta_t=0,
            y_prime=y_prime, mistake=-1, observed=1, v_t=1.0, surrogate_at_w=0.0,
        )

    def trace_surrogate(self, x: np.ndarray, y_true: int) -> float:
        loss, _ = baselines._hinge_and_rows(self.state.w, x, y_true)
        return loss


class BanditronLearner:
    def __init__(self, graph: FeedbackGraph, dim: int, explore: float):
        self.graph = graph
        self.support = baselines.banditron_support(graph)
        self.state = baselines.init_baseline("banditron_iw", graph.n_actions, dim, explore)
        self._p: np.ndarray | None = None
        self._t = 0

    @property
    def weights(self) -> np.ndarray:
        return self.state.w

    def act(self, x: np.ndarray, rng: np.random.Generator) -> int:
        p, _ = baselines.banditron_distribution(self.state, x, self.support)
        self._p = p
        cdf = np.cumsum(p)
        return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))

    def learn(self, x: np.ndarray, y_prime: int, feedback: list[tuple[int, int]]) -> RoundRecord:
        self._t += 1
        assert self._p is not None
        y_true = next((y for y, ind in feedback if ind == 0), None)
        observed = 0
        v_t = 0.0
        if y_true is not None:
            observed = 1
            prob = sum(
                float(self._p[yp])
                for yp in range(self.graph.n_actions)
                if y_true in self.graph.out_neighborhoods[yp]
            )
            v_t = 1.0 / prob
            baselines.banditron_observe(self.state, x, self._p, self.graph, y_true)
        return RoundRecord(
            t=self._t, y_star=-1, a_t=0.0, gamma_t=0.0, zeta_t=0,
            y_prime=y_prime, mistake=-1, observed=observed, v_t=v_t, surrogate_at_w=0.0,
        )

    def trace_surrogate(self, x: np.ndarray, y_true: int) -> float:
        loss, _ = baselines._hinge_and_rows(self.state.w, x, y_true)
        return loss


# ---------------------------------------------------------------------------
# Protocol loop.


@dataclass
class Checkpoint:
    t: int
    cum_mistakes: int
    cum_queries: int
    cum_surrogate_at_w: float
    cum_explore_gamma: float


@dataclass
class RunResult:
    checkpoints: list[Checkpoint] = field(default_factory=list)
    records: list[RoundRecord] | None = None

    @property
    def final(self) -> Checkpoint:
        return self.checkpoints[-1]


def log_checkpoints(horizon: int, n_points: int = 50) -> list[int]:
    if horizon <= 0:
        return []
    pts = np.unique(np.geomspace(1, horizon, num=n_points).round().astype(int))
    return sorted(set(pts.tolist()) | {horizon})


def run_protocol(
    env: SynthStream,
    graph: FeedbackGraph,
    online: OnlineLearner,
    horizon: int,
    rng: np.random.Generator,
    checkpoints: list[int] | None = None,
    keep_records: bool = False,
    on_round: Callable[[int, np.ndarray, int, int, RoundRecord], None] | None = None,
) -> RunResult:
    """Drive ``horizon`` rounds of the environment/learner interaction.

    For each round the environment draws an example, the learner acts,
    the environment answers with the out-neighborhood feedback set, and
    the learner updates.  A prediction outside ``label_actions`` (a label
    query) always counts as a mistake.
    """
    if checkpoints is None:
        checkpoints = log_checkpoints(horizon)
    checkpoint_set = set(checkpoints)
    result = RunResult(records=[] if keep_records else None)
    cum_mistakes = 0
    cum_queries = 0
    cum_surrogate = 0.0
    cum_gamma = 0.0
    for t in range(1, horizon + 1):
        x, y_true = env.sample()
        y_prime = online.act(x, rng)
        trace_loss = online.trace_surrogate(x, y_true)
        feedback = [
            (y, 0 if y == y_true else 1)
            for y in sorted(graph.out_neighborhoods[y_prime])
        ]
        record = online.learn(x, y_prime, feedback)
        record.mistake = 1 if y_prime != y_true else 0
        record.surrogate_at_w = trace_loss
        cum_mistakes += record.mistake
        if y_prime not in graph.label_actions:
            cum_queries += 1
        cum_surrogate += trace_loss
        cum_gamma += record.gamma_t
        if result.records is not None:
            result.records.append(record)
        if on_round is not None:
            on_round(t, x, y_true, y_prime, record)
        if t in checkpoint_set:
            result.checkpoints.append(
                Checkpoint(t, cum_mistakes, cum_queries, cum_surrogate, cum_gamma)
            )
    return result
