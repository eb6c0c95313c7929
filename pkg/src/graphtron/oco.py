"""Full-information online convex optimization core.

Gradient descent with the adaptive step size
``eta_t = (eps + sum_{j<=t} ||g_j||_F^2)^(-1/2)``, optionally followed by
a projection onto the Frobenius ball of radius B.  The learner feeds it
one estimated gradient per round and reads back the next iterate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_EPSILON = 1e-8


@dataclass
class OcoState:
    w: np.ndarray  # (K, d) current iterate
    grad_sq_sum: float
    radius: float | None  # None = unprojected
    epsilon: float = DEFAULT_EPSILON


def oco_init(
    n_actions: int,
    dim: int,
    radius: float | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> OcoState:
    if n_actions < 1 or dim < 1:
        raise ValueError("n_actions and dim must be positive")
    if radius is not None and radius <= 0:
        raise ValueError("radius must be positive")
    return OcoState(
        w=np.zeros((n_actions, dim)), grad_sq_sum=0.0, radius=radius, epsilon=epsilon
    )


def oco_update(state: OcoState, g_hat: np.ndarray) -> OcoState:
    """One adaptive gradient step; mutates and returns ``state``."""
    if not np.all(np.isfinite(g_hat)):
        raise ValueError("gradient contains non-finite entries")
    sq = float((g_hat * g_hat).sum())
    if sq == 0.0:
        return state
    state.grad_sq_sum += sq
    eta = (state.epsilon + state.grad_sq_sum) ** -0.5
    state.w = state.w - eta * g_hat
    if state.radius is not None:
        norm = float(np.linalg.norm(state.w))
        if norm > state.radius:
            state.w = state.w * (state.radius / norm)
    return state
