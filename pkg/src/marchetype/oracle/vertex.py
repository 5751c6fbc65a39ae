"""Brute-force vertex enumeration for tiny LPs.

A vertex of {Ax <= b, lower <= x <= upper} is fixed by W linearly independent
active constraints. Candidates are generated as: pick m rows of A and m free
variables, put every other variable at one of its bounds, and solve the m x m
system. All bound patterns for one (rows, free set) pair are solved in one
batched call.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np

from .dense import DenseLP, OracleResult, OracleStatus, SizeGuardError

logger = logging.getLogger(__name__)

MAX_VERTEX_VARIABLES = 10
FEASIBILITY_TOLERANCE = 1e-9


def _bound_patterns(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """All 2^k corner assignments for k variables, one per row."""
    k = lower.shape[0]
    if k == 0:
        return np.zeros((1, 0))
    bits = (np.arange(2**k)[:, None] >> np.arange(k)) & 1
    return np.where(bits == 1, upper, lower)


def vertex_enumerate(lp: DenseLP) -> OracleResult:
    """Best feasible vertex, or status infeasible when there is none.

    Raises:
        SizeGuardError: If the LP has more than 10 variables.
    """
    W, L = lp.n_vars, lp.n_rows
    if W > MAX_VERTEX_VARIABLES:
        raise SizeGuardError(f"vertex enumeration supports at most {MAX_VERTEX_VARIABLES} "
                             f"variables, got {W}")
    best_x: np.ndarray | None = None
    best_value = np.inf
    candidates = 0
    all_vars = np.arange(W)

    for m in range(min(W, L) + 1):
        for rows in itertools.combinations(range(L), m):
            rows_idx = np.asarray(rows, dtype=np.int64)
            for free in itertools.combinations(range(W), m):
                free_idx = np.asarray(free, dtype=np.int64)
                fixed_idx = np.setdiff1d(all_vars, free_idx)
                patterns = _bound_patterns(lp.lower[fixed_idx], lp.upper[fixed_idx])
                points = np.empty((patterns.shape[0], W))
                points[:, fixed_idx] = patterns
                if m:
                    M = lp.A[np.ix_(rows_idx, free_idx)]
                    if abs(np.linalg.det(M)) < 1e-12:
                        continue
                    coupled = lp.A[np.ix_(rows_idx, fixed_idx)]
                    rhs = lp.b[rows_idx][:, None] - coupled @ patterns.T
                    points[:, free_idx] = np.linalg.solve(M, rhs).T
                candidates += points.shape[0]

                feasible = np.all(points @ lp.A.T <= lp.b + FEASIBILITY_TOLERANCE, axis=1)
                feasible &= np.all(points >= lp.lower - FEASIBILITY_TOLERANCE, axis=1)
                feasible &= np.all(points <= lp.upper + FEASIBILITY_TOLERANCE, axis=1)
                if not np.any(feasible):
                    continue
                values = points[feasible] @ lp.objective
                i = int(np.argmin(values))
                if values[i] < best_value:
                    best_value = float(values[i])
                    best_x = points[feasible][i]

    logger.debug("vertex enumeration checked %d candidate points", candidates)
    if best_x is None:
        return OracleResult(OracleStatus.INFEASIBLE, None, float("nan"))
    return OracleResult(OracleStatus.OPTIMAL, np.clip(best_x, lp.lower, lp.upper), best_value)
