"""Online multiclass classification under arbitrary directed feedback
graphs: gap-based learner, OCO core, baselines, synthetic benchmark
environments, and a property-validation harness."""

from .feedback_graph import (
    FeedbackGraph,
    GraphSummary,
    greedy_dominating_set,
    make_standard,
    revealing_set,
    validate,
)
from .learner import GappletronState, predict_distribution, sample_action, theory_gamma
from .losses import SurrogateLossSpec, make_loss

__all__ = [
    "FeedbackGraph",
    "GraphSummary",
    "GappletronState",
    "SurrogateLossSpec",
    "greedy_dominating_set",
    "make_loss",
    "make_standard",
    "predict_distribution",
    "revealing_set",
    "sample_action",
    "theory_gamma",
    "validate",
]

__version__ = "0.1.0"
