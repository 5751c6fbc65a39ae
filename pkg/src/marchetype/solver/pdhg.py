"""PDHG step, dual objective, normalized duality gap and KKT residuals."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from ..lp import StandardLP
from .problem import SaddleProblem


@dataclass(frozen=True, eq=False)
class SaddleState:
    """Iterate of the two-loop scheme.

    ``x_avg``/``y_avg`` are uniform means of the iterates of the current
    inner loop; ``anchor_x``/``anchor_y`` is the point the inner loop started
    from.
    """

    x: np.ndarray
    y: np.ndarray
    x_avg: np.ndarray
    y_avg: np.ndarray
    anchor_x: np.ndarray
    anchor_y: np.ndarray
    inner_count: int = 0
    outer_count: int = 0
    prev_anchor_distance: float = 0.0
    anchor_gap: float = float("inf")

    @classmethod
    def start(cls, x: np.ndarray, y: np.ndarray) -> SaddleState:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return cls(x=x, y=y, x_avg=x, y_avg=y, anchor_x=x, anchor_y=y)

    def restarted(self, distance: float, gap: float) -> SaddleState:
        """Begin the next outer loop from the current averages."""
        return SaddleState(
            x=self.x_avg,
            y=self.y_avg,
            x_avg=self.x_avg,
            y_avg=self.y_avg,
            anchor_x=self.x_avg,
            anchor_y=self.y_avg,
            inner_count=0,
            outer_count=self.outer_count + 1,
            prev_anchor_distance=distance,
            anchor_gap=gap,
        )

    def distance_from_anchor(self) -> float:
        """‖z̄ − z^{n,0}‖∞."""
        return max(
            float(np.max(np.abs(self.x_avg - self.anchor_x), initial=0.0)),
            float(np.max(np.abs(self.y_avg - self.anchor_y), initial=0.0)),
        )


class KKTResiduals(NamedTuple):
    primal: float
    dual: float
    relative_gap: float

    def within(self, tolerance: float) -> bool:
        return max(self.primal, self.dual, self.relative_gap) <= tolerance


def pdhg_step(state: SaddleState, problem: SaddleProblem | StandardLP, eta: float,
              tau: float) -> SaddleState:
    """One projected primal-dual update followed by the running-average update.

    x⁺ = proj_X(x − η p − η Gᵀy),  y⁺ = proj_Y(y − τ h + τ G(2x⁺ − x)).

    Exactly two sparse products. Non-finite values propagate; the caller
    checks them.
    """
    if eta <= 0 or tau <= 0:
        raise ValueError("step sizes must be positive")
    problem = SaddleProblem.of(problem)
    G = problem.matrix
    x_new = problem.project_x(state.x - eta * (problem.objective + G.rmatvec(state.y)))
    y_new = problem.project_y(state.y - tau * problem.rhs + tau * G.matvec(2.0 * x_new - state.x))
    t = state.inner_count + 1
    return replace(
        state,
        x=x_new,
        y=y_new,
        x_avg=state.x_avg + (x_new - state.x_avg) / t if t > 1 else x_new,
        y_avg=state.y_avg + (y_new - state.y_avg) / t if t > 1 else y_new,
        inner_count=t,
    )


def dual_objective(problem: SaddleProblem | StandardLP, y: np.ndarray) -> float:
    """D(y) = −h·y + Σ_w min over the x box of (p + Gᵀy)_w x_w.

    For the unit box this is −h·y + Σ_w min(0, (p + Gᵀy)_w).
    """
    problem = SaddleProblem.of(problem)
    reduced = problem.objective + problem.matrix.rmatvec(y)
    return float(-problem.rhs @ y + _box_min(reduced, problem.x_lower, problem.x_upper))


def _box_min(c: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    # min over lower <= x <= upper of c·x; zero coefficients contribute nothing.
    at = np.where(c > 0, lower, np.where(c < 0, upper, 0.0))
    terms = np.where(c != 0, c * at, 0.0)
    return float(terms.sum())


def normalized_duality_gap(problem: SaddleProblem | StandardLP, x: np.ndarray, y: np.ndarray,
                           r: float) -> float:
    """ρ_r(z) over the ℓ∞ ball of radius r intersected with the boxes.

    Both inner optimizations separate by coordinate: the maximizing dual moves
    each y_l by r in the direction of (Gx − h)_l, the minimizing primal moves
    each x_w by r against (p + Gᵀy)_w, both clamped to their boxes.

    The gap L(x, ỹ) − L(x̃, y) equals (Gx − h)·(ỹ − y) − (p + Gᵀy)·(x̃ − x),
    a sum of nonnegative terms, so it keeps full relative precision when the
    Lagrangian values themselves are large.

    Raises:
        ValueError: If r <= 0.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    problem = SaddleProblem.of(problem)
    slack = problem.matrix.matvec(x) - problem.rhs
    reduced = problem.objective + problem.matrix.rmatvec(y)

    dy = np.where(slack > 0, np.minimum(problem.y_upper - y, r),
                  -np.minimum(y - problem.y_lower, r))
    dx = np.where(reduced > 0, -np.minimum(x - problem.x_lower, r),
                  np.minimum(problem.x_upper - x, r))

    gain = slack @ dy - reduced @ dx
    return float(max(gain, 0.0) / r)


def kkt_residuals(lp: SaddleProblem | StandardLP, x: np.ndarray, y: np.ndarray) -> KKTResiduals:
    """Relative primal infeasibility, dual residual and duality gap.

    primal = ‖(Gx − h)⁺‖∞ / (1 + ‖h‖∞)
    dual   = ‖x − proj_X(x − (p + Gᵀy))‖∞ / (1 + ‖p‖∞)
    gap    = |p·x − D(y)| / (1 + |p·x| + |D(y)|)
    """
    problem = SaddleProblem.of(lp)
    G = problem.matrix
    h_norm = float(np.max(np.abs(problem.rhs), initial=0.0))
    p_norm = float(np.max(np.abs(problem.objective), initial=0.0))

    violation = np.maximum(G.matvec(x) - problem.rhs, 0.0)
    primal = float(np.max(violation, initial=0.0)) / (1.0 + h_norm)

    reduced = problem.objective + G.rmatvec(y)
    displacement = x - problem.project_x(x - reduced)
    dual = float(np.max(np.abs(displacement), initial=0.0)) / (1.0 + p_norm)

    primal_value = float(problem.objective @ x)
    dual_value = float(-problem.rhs @ y + _box_min(reduced, problem.x_lower, problem.x_upper))
    gap = abs(primal_value - dual_value) / (1.0 + abs(primal_value) + abs(dual_value))
    return KKTResiduals(primal, dual, gap)
