"""Benchmark harness: run specs, CSV persistence, offline comparator.

CSV schema (one row per checkpoint, append-only, header first):
run_id, seed, graph, learner, loss, k, d, noise, gamma, tuning, t,
cum_mistakes, cum_queries, error_rate, cum_surrogate_at_w,
cum_explore_gamma.  ``cum_queries`` is empty except for the
label-efficient graph.  Floats are printed with 9 significant digits.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import feedback_graph, learner as gp, losses
from .environments import (
    BanditronLearner,
    FullInfoBaselineLearner,
    GappletronLearner,
    SynthConfig,
    SynthStream,
    log_checkpoints,
    make_run_rngs,
    run_protocol,
)
from .feedback_graph import KIND_ALIASES, make_standard
from .losses import make_loss

CSV_COLUMNS = [
    "run_id",
    "seed",
    "graph",
    "learner",
    "loss",
    "k",
    "d",
    "noise",
    "gamma",
    "tuning",
    "t",
    "cum_mistakes",
    "cum_queries",
    "error_rate",
    "cum_surrogate_at_w",
    "cum_explore_gamma",
]

LEARNER_NAMES = ("gappletron", "perceptron", "pa", "banditron")


@dataclass(frozen=True)
class RunSpec:
    graph: str
    learner: str
    loss: str
    kappa: float
    n_classes: int
    d_prime: int
    noise: float
    rounds: int
    seed: int
    rep: int
    gamma: float
    tuning: str
    oco_mode: str = "adaptive"  # or "projected"
    radius: float = 1.0
    explore: float = 0.5

    @property
    def run_id(self) -> str:
        return (
            f"{self.graph}:{self.learner}:{self.loss}:K{self.n_classes}"
            f":d{40 * self.d_prime}:n{self.noise:g}:rep{self.rep}"
        )


def synth_x_norm_bound(d_prime: int) -> float:
    """Max squared feature norm of the keyword stream: at most ``5 d'``
    keyword bits plus exactly ``5 d'`` unrelated bits are on."""
    return float(10 * d_prime)


def resolve_gamma(
    tuning: str,
    gamma_flag: float | None,
    graph_kind: str,
    loss_name: str,
    kappa: float,
    n_classes: int,
    d_prime: int,
    radius: float,
    delta: float,
) -> tuple[float, str]:
    """Pick the exploration parameter from a flag or a tuning preset."""
    if gamma_flag is not None:
        return float(gamma_flag), "manual"
    graph = make_standard(graph_kind, n_classes)
    summary_rho = len(feedback_graph.greedy_dominating_set(graph))
    spec = make_loss(loss_name, kappa)
    x_sq = synth_x_norm_bound(d_prime)
    x = np.zeros(2)  # smoothness depends on x only through its norm
    x[0] = np.sqrt(x_sq)
    smoothness = spec.smoothness(x, graph.n_actions)
    grad_bound = 2.0 * np.sqrt(x_sq)
    ell_max = 1.0 + radius * grad_bound
    value = gp.theory_gamma(
        tuning,
        radius,
        smoothness,
        summary_rho,
        graph.n_actions,
        delta=delta,
        ell_max=ell_max,
    )
    return float(value), tuning


def build_learner(spec: RunSpec, dim: int):
    graph = make_standard(spec.graph, spec.n_classes)
    if spec.learner == "gappletron":
        loss = make_loss(spec.loss, spec.kappa)
        radius = spec.radius if spec.oco_mode == "projected" else None
        return graph, GappletronLearner(graph, loss, dim, spec.gamma, radius=radius)
    if spec.learner in ("perceptron", "pa"):
        kind = "perceptron" if spec.learner == "perceptron" else "passive_aggressive"
        return graph, FullInfoBaselineLearner(kind, graph, dim)
    if spec.learner == "banditron":
        return graph, BanditronLearner(graph, dim, spec.explore)
    raise ValueError(
        f"unknown learner {spec.learner!r}; valid learners: {', '.join(LEARNER_NAMES)}"
    )


def execute_run(spec: RunSpec) -> list[dict]:
    """One run: build everything from the spec, return checkpoint rows."""
    if KIND_ALIASES.get(spec.graph) == "apple_tasting" and spec.n_classes != 2:
        raise ValueError("the apple-tasting graph has exactly 2 classes")
    config = SynthConfig(spec.n_classes, spec.d_prime, spec.noise, seed=spec.seed)
    graph, online = build_learner(spec, config.dim)
    env_rng, learner_rng = make_run_rngs(spec.seed, spec.rep)
    stream = SynthStream(config, env_rng)
    result = run_protocol(
        stream, graph, online, spec.rounds, learner_rng,
        checkpoints=log_checkpoints(spec.rounds),
    )
    is_label_efficient = KIND_ALIASES.get(spec.graph) == "label_efficient"
    rows = []
    for cp in result.checkpoints:
        rows.append(
            {
                "run_id": spec.run_id,
                "seed": spec.seed,
                "graph": spec.graph,
                "learner": spec.learner,
                "loss": spec.loss,
                "k": spec.n_classes,
                "d": config.dim,
                "noise": _fmt(spec.noise),
                "gamma": _fmt(spec.gamma),
                "tuning": spec.tuning,
                "t": cp.t,
                "cum_mistakes": cp.cum_mistakes,
                "cum_queries": cp.cum_queries if is_label_efficient else "",
                "error_rate": _fmt(cp.cum_mistakes / cp.t),
                "cum_surrogate_at_w": _fmt(cp.cum_surrogate_at_w),
                "cum_explore_gamma": _fmt(cp.cum_explore_gamma),
            }
        )
    return rows


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def max_workers() -> int:
    cap = os.environ.get("GRAPHTRON_THREADS")
    if cap:
        return max(1, int(cap))
    return 1


def execute_many(specs: list[RunSpec]) -> list[list[dict]]:
    """Run a batch of specs, possibly across a worker pool; results come
    back in spec order so CSV output is deterministic."""
    workers = min(max_workers(), len(specs)) or 1
    if workers <= 1 or len(specs) <= 1:
        return [execute_run(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(execute_run, specs))


def write_csv(path: str, row_groups: list[list[dict]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for rows in row_groups:
            writer.writerows(rows)


# ---------------------------------------------------------------------------
# Offline comparator oracle.


def offline_comparator(
    loss_spec: losses.SurrogateLossSpec,
    xs: np.ndarray,
    ys: np.ndarray,
    n_actions: int,
    epochs: int = 20,
    radius: float = 10.0,
    batch_size: int = 256,
    seed: int = 0,
) -> tuple[np.ndarray, float]:
    """Approximate minimizer of the total surrogate loss on a realized
    sequence: multi-epoch projected stochastic gradient descent with an
    adaptive step.  The returned total loss is an upper bound on the true
    minimum."""
    horizon, dim = xs.shape
    w = np.zeros((n_actions, dim))
    if epochs > 0 and horizon > 0:
        rng = np.random.default_rng(seed)
        grad_sq_sum = 0.0
        for _ in range(epochs):
            perm = rng.permutation(horizon)
            for start in range(0, horizon, batch_size):
                idx = perm[start : start + batch_size]
                g = losses.batch_loss_gradient(loss_spec, w, xs[idx], ys[idx])
                g /= len(idx)
                grad_sq_sum += float((g * g).sum())
                eta = radius / np.sqrt(1e-8 + grad_sq_sum)
                w -= eta * g
                norm = float(np.linalg.norm(w))
                if norm > radius:
                    w *= radius / norm
    total = float(losses.batch_loss(loss_spec, w, xs, ys).sum())
    return w, total


def comparator_loss_for_spec(spec: RunSpec, epochs: int = 20, radius: float = 10.0):
    """Regenerate a run's realized stream (the environment RNG is isolated
    from the learner RNG, so the stream depends only on seed and rep) and
    fit the comparator on it."""
    config = SynthConfig(spec.n_classes, spec.d_prime, spec.noise, seed=spec.seed)
    env_rng, _ = make_run_rngs(spec.seed, spec.rep)
    stream = SynthStream(config, env_rng)
    xs, ys = stream.realize(spec.rounds)
    # The comparator for the dead-zone hinge is the plain multiclass hinge
    # (kappa = 1: the dead zone then only covers points with zero hinge),
    # which dominates the dead-zone value for any fixed comparator matrix.
    loss_spec = make_loss(spec.loss, 1.0 if spec.loss == "hinge" else spec.kappa)
    n_actions = make_standard(spec.graph, spec.n_classes).n_actions
    return offline_comparator(
        loss_spec, xs, ys, n_actions, epochs=epochs, radius=radius
    )
