"""Bounded-variable primal simplex with Bland's rule.

Rows get slacks (Ax + s = b, s >= 0); rows whose slack would start negative
get an artificial variable instead and phase one drives the artificials to
zero. Variable bounds are handled natively: nonbasic variables sit at a
bound and may flip to the other one without a basis change.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .dense import DenseLP, OracleError, OracleResult, OracleStatus

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-11
COST_TOLERANCE = 1e-9
RATIO_TOLERANCE = 1e-9
FEASIBILITY_TOLERANCE = 1e-9


class SimplexBreakdownError(OracleError):
    """Raised on a numerically unusable pivot or an iteration blow-up."""

    def __init__(self, message: str, iteration: int, entering: int | None = None,
                 leaving: int | None = None, pivot: float | None = None) -> None:
        super().__init__(
            f"{message} (iteration {iteration}, entering {entering}, leaving {leaving}, "
            f"pivot {pivot})"
        )
        self.iteration = iteration
        self.entering = entering
        self.leaving = leaving
        self.pivot = pivot


@dataclass
class _Tableau:
    """Working data of one simplex phase (dense, column-indexed)."""

    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    basis: list[int]
    at_upper: np.ndarray

    def nonbasic_values(self) -> np.ndarray:
        x = np.where(self.at_upper, self.upper, self.lower)
        x[self.basis] = 0.0
        return x

    def values(self, lu: tuple) -> np.ndarray:
        x = self.nonbasic_values()
        x[self.basis] = linalg.lu_solve(lu, self.b - self.A @ x)
        return x


def _factor(tab: _Tableau, iteration: int) -> tuple:
    lu = linalg.lu_factor(tab.A[:, tab.basis], check_finite=False)
    diagonal = np.abs(np.diag(lu[0]))
    smallest = int(np.argmin(diagonal))
    if diagonal[smallest] < PIVOT_TOLERANCE:
        raise SimplexBreakdownError("near-singular basis", iteration,
                                    leaving=tab.basis[smallest], pivot=float(diagonal[smallest]))
    return lu


def _run_phase(tab: _Tableau, cost: np.ndarray, start_iteration: int,
               max_iterations: int) -> int:
    """Optimize ``cost`` from the tableau's basis; returns the iteration counter."""
    n = tab.A.shape[1]
    iteration = start_iteration
    while True:
        if iteration >= max_iterations:
            raise SimplexBreakdownError("iteration limit reached", iteration)
        lu = _factor(tab, iteration)
        x = tab.values(lu)
        duals = linalg.lu_solve(lu, cost[tab.basis], trans=1)
        reduced = cost - tab.A.T @ duals

        is_basic = np.zeros(n, dtype=bool)
        is_basic[tab.basis] = True
        movable = (~is_basic) & (tab.upper > tab.lower)
        improving = movable & (
            ((~tab.at_upper) & (reduced < -COST_TOLERANCE))
            | (tab.at_upper & (reduced > COST_TOLERANCE))
        )
        candidates = np.flatnonzero(improving)
        if candidates.shape[0] == 0:
            return iteration
        entering = int(candidates[0])
        sigma = -1.0 if tab.at_upper[entering] else 1.0

        alpha = linalg.lu_solve(lu, tab.A[:, entering])
        rate = -sigma * alpha  # d x_B / d θ
        basic = np.asarray(tab.basis)
        theta = tab.upper[entering] - tab.lower[entering]
        leave_pos: int | None = None
        leave_to_upper = False
        for pos in np.argsort(basic, kind="stable"):
            r = rate[pos]
            if abs(r) <= RATIO_TOLERANCE:
                continue
            var = basic[pos]
            if r < 0:
                limit = (x[var] - tab.lower[var]) / -r
                to_upper = False
            else:
                if not np.isfinite(tab.upper[var]):
                    continue
                limit = (tab.upper[var] - x[var]) / r
                to_upper = True
            limit = max(limit, 0.0)
            # Bland: ties go to the smallest variable index (scan order).
            if limit < theta:
                theta = limit
                leave_pos = int(pos)
                leave_to_upper = to_upper

        if not np.isfinite(theta):
            raise SimplexBreakdownError("unbounded direction in a bounded LP", iteration, entering)

        if leave_pos is None:
            tab.at_upper[entering] = not tab.at_upper[entering]
        else:
            pivot = float(alpha[leave_pos])
            leaving = int(basic[leave_pos])
            if abs(pivot) < PIVOT_TOLERANCE:
                raise SimplexBreakdownError("pivot below tolerance", iteration, entering,
                                            leaving, pivot)
            tab.basis[leave_pos] = entering
            tab.at_upper[entering] = False
            tab.at_upper[leaving] = leave_to_upper
        iteration += 1


def simplex_solve(lp: DenseLP, max_iterations: int | None = None) -> OracleResult:
    """Exact optimum of ``min c·x s.t. Ax <= b, lower <= x <= upper``.

    Raises:
        SimplexBreakdownError: On a pivot below 1e-11 or too many iterations.
    """
    L, W = lp.A.shape
    if L == 0:
        x = np.where(lp.objective < 0, lp.upper, lp.lower)
        return OracleResult(OracleStatus.OPTIMAL, x, float(lp.objective @ x), 0)
    lower_start = lp.lower.copy()
    residual = lp.b - lp.A @ lower_start
    needs_artificial = residual < 0
    n_art = int(needs_artificial.sum())

    # Columns: x (W) | slacks (L) | artificials (n_art).
    art_cols = np.zeros((L, n_art))
    art_cols[np.flatnonzero(needs_artificial), np.arange(n_art)] = -1.0
    A = np.hstack((lp.A, np.eye(L), art_cols))
    lower = np.concatenate((lp.lower, np.zeros(L), np.zeros(n_art)))
    upper = np.concatenate((lp.upper, np.full(L, np.inf), np.full(n_art, np.inf)))
    basis = [W + row for row in range(L)]
    for a, row in enumerate(np.flatnonzero(needs_artificial)):
        basis[row] = W + L + a
    tab = _Tableau(A, lp.b.copy(), lower, upper, basis, np.zeros(W + L + n_art, dtype=bool))

    limit = max_iterations or 50 * (W + L + n_art + 10)
    iterations = 0
    if n_art:
        phase_one = np.concatenate((np.zeros(W + L), np.ones(n_art)))
        iterations = _run_phase(tab, phase_one, 0, limit)
        lu = _factor(tab, iterations)
        infeasibility = float(tab.values(lu)[W + L:].sum())
        scale = 1.0 + float(np.max(np.abs(lp.b), initial=0.0))
        if infeasibility > FEASIBILITY_TOLERANCE * scale:
            logger.debug("phase one ended with infeasibility %.3e", infeasibility)
            return OracleResult(OracleStatus.INFEASIBLE, None, float("nan"), iterations)
        # Artificials still basic stay pinned at zero.
        tab.upper[W + L:] = 0.0

    cost = np.concatenate((lp.objective, np.zeros(L + n_art)))
    iterations = _run_phase(tab, cost, iterations, limit)
    lu = _factor(tab, iterations)
    x = np.clip(tab.values(lu)[:W], lp.lower, lp.upper)
    logger.debug("simplex optimal after %d iterations", iterations)
    return OracleResult(OracleStatus.OPTIMAL, x, float(lp.objective @ x), iterations)
