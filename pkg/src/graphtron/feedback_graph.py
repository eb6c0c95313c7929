"""Directed feedback graphs over action nodes.

A feedback graph on ``n_actions`` nodes encodes which zero-one losses the
learner observes: playing action ``y_prime`` reveals the loss of every
``y`` in ``out(y_prime)``.  Node identifiers are 1-based in files and in
the CLI, 0-based internally (all sets in this module are 0-based).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

STANDARD_KINDS = (
    "full_information",
    "bandit",
    "apple_tasting",
    "label_efficient",
    "spam_filter_multiclass",
)

# CLI-facing aliases.
KIND_ALIASES = {
    "full": "full_information",
    "full-information": "full_information",
    "full_information": "full_information",
    "bandit": "bandit",
    "apple": "apple_tasting",
    "apple-tasting": "apple_tasting",
    "apple_tasting": "apple_tasting",
    "label-efficient": "label_efficient",
    "label_efficient": "label_efficient",
    "spam-filter": "spam_filter_multiclass",
    "spam_filter": "spam_filter_multiclass",
    "spam_filter_multiclass": "spam_filter_multiclass",
}


class GraphValidationError(ValueError):
    """Raised when a raw graph cannot be turned into a usable feedback graph."""


@dataclass(frozen=True)
class FeedbackGraph:
    """Validated feedback graph; immutable, safe to share across runs."""

    n_actions: int
    out_neighborhoods: tuple[frozenset[int], ...]
    label_actions: frozenset[int]

    def out(self, y_prime: int) -> frozenset[int]:
        return self.out_neighborhoods[y_prime]


@dataclass(frozen=True)
class GraphSummary:
    """Revealing set, a dominating set, and its cardinality."""

    revealing_set: frozenset[int]
    dominating_set: frozenset[int]
    domination_number_bound: int


def validate(
    n_actions: int,
    out_neighborhoods: Sequence[Iterable[int]],
    label_actions: Iterable[int] | None = None,
) -> FeedbackGraph:
    """Validate a raw graph, applying the missing-edge augmentation.

    Any node with exactly ``n_actions - 1`` outgoing edges gains the missing
    edge (it makes no difference to the information available).  Raises
    :class:`GraphValidationError` if some node still has no incoming edge,
    since its zero-one loss could then never be observed.
    """
    if n_actions < 1:
        raise GraphValidationError("graph needs at least one node")
    if len(out_neighborhoods) != n_actions:
        raise GraphValidationError(
            f"expected {n_actions} out-neighborhoods, got {len(out_neighborhoods)}"
        )
    outs = []
    for y_prime, raw in enumerate(out_neighborhoods):
        out = frozenset(raw)
        for y in out:
            if not 0 <= y < n_actions:
                raise GraphValidationError(
                    f"node {y_prime + 1}: out-neighbor {y + 1} outside 1..{n_actions}"
                )
        if len(out) == n_actions - 1:
            out = frozenset(range(n_actions))
        outs.append(out)

    covered = frozenset().union(*outs) if outs else frozenset()
    missing = sorted(set(range(n_actions)) - covered)
    if missing:
        raise GraphValidationError(
            "nodes without incoming edges (unobservable outcomes): "
            + " ".join(str(y + 1) for y in missing)
        )

    if label_actions is None:
        labels = frozenset(range(n_actions))
    else:
        labels = frozenset(label_actions)
        if not labels:
            raise GraphValidationError("label_actions must be non-empty")
        if not labels <= set(range(n_actions)):
            raise GraphValidationError("label_actions outside node range")
    return FeedbackGraph(n_actions, tuple(outs), labels)


def revealing_set(graph: FeedbackGraph) -> frozenset[int]:
    """Actions whose out-neighborhood is the whole node set."""
    full = frozenset(range(graph.n_actions))
    return frozenset(
        y for y in range(graph.n_actions) if graph.out_neighborhoods[y] == full
    )


def greedy_dominating_set(graph: FeedbackGraph) -> frozenset[int]:
    """Greedy dominating set: repeatedly pick the node covering the most
    uncovered nodes, ties broken by lowest index."""
    uncovered = set(range(graph.n_actions))
    chosen: set[int] = set()
    while uncovered:
        best, best_gain = -1, -1
        for y in range(graph.n_actions):
            gain = len(graph.out_neighborhoods[y] & uncovered)
            if gain > best_gain:
                best, best_gain = y, gain
        if best_gain <= 0:
            # Unreachable after validation; kept as a hard failure.
            raise GraphValidationError("no dominating set exists")
        chosen.add(best)
        uncovered -= graph.out_neighborhoods[best]
    return frozenset(chosen)


def exact_domination_number(graph: FeedbackGraph) -> int:
    """Minimum dominating-set size by exhaustive subset search (test oracle).

    Capped at 16 nodes: 2^16 subsets is desk-scale.
    """
    n = graph.n_actions
    if n > 16:
        raise ValueError("exact_domination_number supports at most 16 nodes")
    all_nodes = frozenset(range(n))
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            covered: set[int] = set()
            for y in subset:
                covered |= graph.out_neighborhoods[y]
            if covered == all_nodes:
                return size
    raise GraphValidationError("no dominating set exists")


def summarize(graph: FeedbackGraph) -> GraphSummary:
    dom = greedy_dominating_set(graph)
    return GraphSummary(revealing_set(graph), dom, len(dom))


def make_standard(kind: str, n_classes: int) -> FeedbackGraph:
    """Build one of the five standard graphs.

    ``apple_tasting`` is the two-action graph regardless of ``n_classes``;
    node 0 is the revealing "non-spam" action, node 1 is blind.
    ``label_efficient`` has ``n_classes + 1`` actions with the query node
    last, and restricts ``label_actions`` to the class nodes.
    """
    canonical = KIND_ALIASES.get(kind)
    if canonical is None:
        raise ValueError(
            f"unknown graph kind {kind!r}; valid kinds: {', '.join(STANDARD_KINDS)}"
        )
    if n_classes < 2:
        raise ValueError("n_classes must be at least 2")
    k = n_classes
    if canonical == "full_information":
        outs: list[set[int]] = [set(range(k)) for _ in range(k)]
        return validate(k, outs)
    if canonical == "bandit":
        return validate(k, [{y} for y in range(k)])
    if canonical == "apple_tasting":
        return validate(2, [{0, 1}, set()])
    if canonical == "label_efficient":
        n = k + 1
        outs = [set() for _ in range(k)]
        outs.append(set(range(k)))  # query node; augmentation adds its self-loop
        return validate(n, outs, label_actions=range(k))
    # spam_filter_multiclass
    outs = [set(range(k))] + [set() for _ in range(k - 1)]
    return validate(k, outs)


def load_graph_file(path: str) -> FeedbackGraph:
    """Read the plain-text graph format.

    Line 1: ``n_actions``.  Line 2: space-separated 1-based label actions.
    Each remaining line: ``y: y1 y2 ...`` listing out(y), 1-based.
    Nodes without a line have empty out-neighborhoods.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise GraphValidationError("graph file needs at least two lines")
    n_actions = int(lines[0])
    labels = [int(tok) - 1 for tok in lines[1].split()]
    outs: list[set[int]] = [set() for _ in range(n_actions)]
    for ln in lines[2:]:
        head, _, rest = ln.partition(":")
        y = int(head) - 1
        if not 0 <= y < n_actions:
            raise GraphValidationError(f"graph file references node {y + 1}")
        outs[y] = {int(tok) - 1 for tok in rest.split()}
    return validate(n_actions, outs, label_actions=labels)


def dump_graph_file(graph: FeedbackGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n_actions}\n")
        fh.write(" ".join(str(y + 1) for y in sorted(graph.label_actions)) + "\n")
        for y in range(graph.n_actions):
            out = " ".join(str(v + 1) for v in sorted(graph.out_neighborhoods[y]))
            fh.write(f"{y + 1}: {out}\n")
