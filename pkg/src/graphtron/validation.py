"""Property-validation suite behind the ``validate`` subcommand.

Each check returns a :class:`PropertyResult`.  Checks flagged
``asserted=False`` are informational only (the base-K logistic loss is
known to miss the wrong-plus-right condition near margin ties for K >= 3)
and never fail the suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import feedback_graph as fg
from . import learner as gp
from . import losses
from .environments import GappletronLearner, SynthConfig, SynthStream, make_run_rngs, run_protocol
from .losses import SurrogateLossSpec, make_loss

BOUND_TOL = 1e-9
FD_STEP = 1e-6
FD_REL_TOL = 1e-5


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str
    asserted: bool = True


# ---------------------------------------------------------------------------
# Loss regularity and gradients.


def regularity_results(
    n_samples: int = 10_000, ks: tuple[int, ...] = (2, 6, 9, 12), dim: int = 10, seed: int = 0
) -> list[PropertyResult]:
    out = []
    rng = np.random.default_rng(seed)
    for name in ("smooth-hinge", "hinge", "logistic"):
        spec = make_loss(name)
        for k in ks:
            rep = losses.check_regularity(spec, k, dim, n_samples, rng)
            detail = (
                f"wrong_right={rep.wrong_right_violation_rate:.4f} self_bound={rep.self_bound_violation_rate:.4f} "
                f"max_self_bound_ratio={rep.max_self_bound_ratio:.3f}"
            )
            if name == "smooth-hinge":
                ok = rep.wrong_right_violation_rate == 0.0 and rep.self_bound_violation_rate == 0.0
                out.append(PropertyResult(f"regularity[smooth-hinge,K={k}]", ok, detail))
            elif name == "hinge":
                ok = rep.self_bound_violation_rate == 0.0
                out.append(PropertyResult(f"regularity[hinge,K={k}] (self-bound only)", ok, detail))
            else:
                ok = rep.wrong_right_violation_rate == 0.0 and rep.self_bound_violation_rate == 0.0
                out.append(
                    PropertyResult(
                        f"regularity[logistic,K={k}]", ok, detail, asserted=(k == 2)
                    )
                )
    return out


def finite_difference_gradient(
    spec: SurrogateLossSpec, w: np.ndarray, x: np.ndarray, y: int, step: float = FD_STEP
) -> np.ndarray:
    grad = np.zeros_like(w)
    for i in range(w.shape[0]):
        for j in range(w.shape[1]):
            wp = w.copy()
            wm = w.copy()
            wp[i, j] += step
            wm[i, j] -= step
            grad[i, j] = (
                losses.loss_value(spec, wp, x, y) - losses.loss_value(spec, wm, x, y)
            ) / (2.0 * step)
    return grad


def _hinge_near_kink(spec: SurrogateLossSpec, w: np.ndarray, x: np.ndarray, y: int) -> bool:
    score = w @ x
    m = losses.margin(score, y)
    y_star = losses.argmax_action(score)
    m_star = losses.margin(score, y_star)
    return abs(m) <= 1e-3 or abs(1.0 - m) <= 1e-3 or abs(m_star - spec.kappa) <= 1e-3


def gradient_results(
    n_points: int = 1000, n_actions: int = 5, dim: int = 7, seed: int = 1
) -> list[PropertyResult]:
    """Central finite differences against analytic gradients.

    The hinge is checked only away from its kinks, where the subgradient
    is the gradient.
    """
    out = []
    for name in ("logistic", "smooth-hinge", "hinge"):
        spec = make_loss(name)
        rng = np.random.default_rng(seed)
        worst = 0.0
        checked = 0
        while checked < n_points:
            w = rng.standard_normal((n_actions, dim))
            x = rng.standard_normal(dim)
            y = int(rng.integers(n_actions))
            if name == "hinge" and _hinge_near_kink(spec, w, x, y):
                continue
            if name == "smooth-hinge":
                # skip the (measure-zero) non-smooth argmax ties
                score = w @ x
                m = losses.margin(score, y)
                if abs(m) <= 1e-3 or abs(1.0 - m) <= 1e-3:
                    continue
            checked += 1
            analytic = losses.loss_gradient(spec, w, x, y)
            numeric = finite_difference_gradient(spec, w, x, y)
            scale = max(float(np.linalg.norm(numeric)), 1e-8)
            worst = max(worst, float(np.linalg.norm(analytic - numeric)) / scale)
        ok = worst <= FD_REL_TOL
        out.append(
            PropertyResult(f"gradient-fd[{name}]", ok, f"max_rel_err={worst:.2e}")
        )
    return out


# ---------------------------------------------------------------------------
# Per-round expected-mistake inequality.


def mistake_bound_violations(
    graph_kind: str,
    loss_name: str,
    horizon: int = 10_000,
    n_classes: int = 6,
    d_prime: int = 2,
    noise: float = 0.1,
    seed: int = 0,
    gamma: float = 1.0,
) -> tuple[int, int]:
    """Count rounds violating the per-round expected-mistake bound
    sum_y p'(y) 1[y != y_t] <= factor * loss_t(W_t) + gamma_t + tol."""
    graph = fg.make_standard(graph_kind, n_classes)
    n_classes = len(graph.label_actions)  # apple tasting forces 2 classes
    spec = make_loss(loss_name)
    config = SynthConfig(n_classes, d_prime, noise, seed=seed)
    env_rng, learner_rng = make_run_rngs(seed, 0)
    stream = SynthStream(config, env_rng)
    online = GappletronLearner(graph, spec, config.dim, gamma)
    factor = gp.mistake_bound_factor(spec, graph.n_actions)
    violations = 0

    def on_round(t, x, y_true, y_prime, record):
        nonlocal violations
        p = online.last_outcome.p_prime
        expected_mistake = 1.0 - float(p[y_true])
        bound = factor * record.surrogate_at_w + record.gamma_t + BOUND_TOL
        if expected_mistake > bound:
            violations += 1

    run_protocol(stream, graph, online, horizon, learner_rng, on_round=on_round)
    return violations, horizon


def mistake_bound_results(
    horizon: int = 10_000,
    seeds: tuple[int, ...] = (0,),
    graph_kinds: tuple[str, ...] = ("full", "bandit", "apple", "label-efficient", "spam-filter"),
) -> list[PropertyResult]:
    out = []
    for kind in graph_kinds:
        for loss_name in ("smooth-hinge", "hinge", "logistic"):
            total = 0
            for seed in seeds:
                v, _ = mistake_bound_violations(kind, loss_name, horizon=horizon, seed=seed)
                total += v
            asserted = loss_name != "logistic"
            out.append(
                PropertyResult(
                    f"mistake-bound[{kind},{loss_name}]",
                    total == 0,
                    f"violations={total}/{horizon * len(seeds)}",
                    asserted=asserted,
                )
            )
    return out


# ---------------------------------------------------------------------------
# Importance-weight unbiasedness.


def unbiasedness_exact(
    graph: fg.FeedbackGraph, p_prime: np.ndarray, y_true: int
) -> float:
    """Exact E[v] = sum_{y'} p'(y') 1[y_true in out(y')] / P; equals 1
    whenever the observation probability is positive."""
    prob = gp.observation_probability(p_prime, graph, y_true)
    total = 0.0
    for y_prime in range(graph.n_actions):
        if y_true in graph.out_neighborhoods[y_prime]:
            total += p_prime[y_prime] / prob
    return total


def unbiasedness_results(
    n_mc: int = 1_000_000, seed: int = 3
) -> list[PropertyResult]:
    out = []
    rng = np.random.default_rng(seed)
    for kind, k in (("bandit", 4), ("apple", 2)):
        graph = fg.make_standard(kind, k)
        spec = make_loss("smooth-hinge")
        dim = 6
        online = GappletronLearner(graph, spec, dim, gamma=1.0)
        online.state.oco.w = rng.standard_normal((graph.n_actions, dim)) * 0.05
        x = rng.standard_normal(dim)
        outcome = gp.predict_distribution(online.state, x)
        y_true = int(rng.integers(len(graph.label_actions)))
        prob = gp.observation_probability(outcome.p_prime, graph, y_true)
        exact = unbiasedness_exact(graph, outcome.p_prime, y_true)
        ok_exact = abs(exact - 1.0) <= 1e-12

        # Monte Carlo: draw y', average v(y') = 1[observed]/P.
        draws = rng.choice(
            graph.n_actions, size=n_mc, p=outcome.p_prime / outcome.p_prime.sum()
        )
        observes = np.isin(
            draws,
            [yp for yp in range(graph.n_actions) if y_true in graph.out_neighborhoods[yp]],
        )
        v = observes / prob
        mean = float(v.mean())
        sigma = float(v.std(ddof=1)) / np.sqrt(n_mc)
        ok_mc = abs(mean - 1.0) <= 3.0 * sigma + 1e-12
        out.append(
            PropertyResult(
                f"unbiasedness[{kind}]",
                ok_exact and ok_mc,
                f"exact={exact:.15f} mc={mean:.5f} (3sigma={3 * sigma:.5f})",
            )
        )
    return out


# ---------------------------------------------------------------------------
# Dominating sets.


def random_valid_graph(rng: np.random.Generator, max_nodes: int = 12) -> fg.FeedbackGraph:
    n = int(rng.integers(2, max_nodes + 1))
    outs: list[set[int]] = []
    for _ in range(n):
        mask = rng.random(n) < 0.3
        outs.append(set(np.flatnonzero(mask).tolist()))
    covered = set().union(*outs)
    for y in range(n):
        if y not in covered:
            outs[int(rng.integers(n))].add(y)
    return fg.validate(n, outs)


def dominating_set_results(n_graphs: int = 100, seed: int = 5) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    all_dominate = True
    greedy_ge_exact = True
    for _ in range(n_graphs):
        graph = random_valid_graph(rng)
        dom = fg.greedy_dominating_set(graph)
        covered = set().union(*(graph.out_neighborhoods[y] for y in dom))
        if covered != set(range(graph.n_actions)):
            all_dominate = False
        if len(dom) < fg.exact_domination_number(graph):
            greedy_ge_exact = False
    out = [
        PropertyResult("greedy-dominates[random]", all_dominate, f"{n_graphs} graphs"),
        PropertyResult("greedy>=exact[random]", greedy_ge_exact, f"{n_graphs} graphs"),
    ]
    expected = {
        "full": 1,
        "bandit": 6,
        "apple": 1,
        "label-efficient": 1,
        "spam-filter": 1,
    }
    ok = True
    details = []
    for kind, rho in expected.items():
        graph = fg.make_standard(kind, 6)
        g_size = len(fg.greedy_dominating_set(graph))
        e_size = fg.exact_domination_number(graph)
        details.append(f"{kind}:greedy={g_size},exact={e_size}")
        if g_size != e_size or e_size != rho:
            ok = False
    out.append(PropertyResult("greedy==exact[standard]", ok, " ".join(details)))
    return out


# ---------------------------------------------------------------------------
# Whole suite.


def run_suite(fast: bool = False) -> list[PropertyResult]:
    n_samples = 2_000 if fast else 10_000
    horizon = 2_000 if fast else 10_000
    n_mc = 100_000 if fast else 1_000_000
    results: list[PropertyResult] = []
    results += regularity_results(n_samples=n_samples)
    results += gradient_results(n_points=200 if fast else 1000)
    results += mistake_bound_results(horizon=horizon)
    results += unbiasedness_results(n_mc=n_mc)
    results += dominating_set_results()
    return results


def report(results: list[PropertyResult]) -> tuple[str, bool]:
    lines = []
    all_ok = True
    for r in results:
        if r.asserted:
            status = "PASS" if r.passed else "FAIL"
            all_ok = all_ok and r.passed
        else:
            status = "INFO"
        lines.append(f"{status} {r.name}: {r.detail}")
    lines.append("suite: " + ("PASS" if all_ok else "FAIL"))
    return "\n".join(lines), all_ok
