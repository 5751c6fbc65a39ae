"""IPwC versus SPwC: profit comparison and the collapse-fraction sweep."""

from __future__ import annotations

import csv
import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..lp import StandardLP
from ..oracle import OracleStatus, densify, simplex_solve
from ..solver import SolverConfig, SolveStatus, solve
from ..targeting import ConstraintMenu, TargetingInstance, compile_ipwc, compile_spwc

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LPOutcome:
    """Objective (minimization form), whether it is optimal, and the work spent."""

    objective: float
    optimal: bool
    iterations: int

    @property
    def profit(self) -> float:
        return -self.objective


LPBackend = Callable[[StandardLP], LPOutcome]


def pdhg_backend(config: SolverConfig | None = None) -> LPBackend:
    def run(lp: StandardLP) -> LPOutcome:
        report = solve(lp, config)
        return LPOutcome(report.objective, report.status is SolveStatus.OPTIMAL,
                         report.iterations)

    return run


def oracle_backend(lp: StandardLP) -> LPOutcome:
    result = simplex_solve(densify(lp))
    optimal = result.status is OracleStatus.OPTIMAL
    return LPOutcome(result.objective if optimal else float("nan"), optimal, result.iterations)


@dataclass(frozen=True)
class Comparison:
    ipwc: LPOutcome
    spwc: LPOutcome

    @property
    def difference(self) -> float:
        """Profit(IPwC) − profit(SPwC); non-negative up to solver tolerance."""
        return self.ipwc.profit - self.spwc.profit

    @property
    def optimal(self) -> bool:
        return self.ipwc.optimal and self.spwc.optimal


def compare_policies(instance: TargetingInstance, menu: ConstraintMenu,
                     backend: LPBackend | None = None) -> Comparison:
    """Solve both formulations on the instance's own action segmentation."""
    backend = backend or pdhg_backend()
    return Comparison(backend(compile_ipwc(instance, menu)),
                      backend(compile_spwc(instance, menu)))


def collapse_action_segments(instance: TargetingInstance, collapsed: np.ndarray,
                             ) -> TargetingInstance:
    """Action segments where each listed constraint segment shares one decision.

    Customers of the listed segments get their segment as action segment; every
    other customer is its own action segment.
    """
    collapsed = np.asarray(collapsed, dtype=np.int64)
    seg = instance.constraint_segment_of
    is_collapsed = np.isin(seg, collapsed)
    action_key = np.where(is_collapsed, seg, instance.n_segments + np.arange(instance.n_customers))
    _, action_segment_of = np.unique(action_key, return_inverse=True)
    return instance.with_action_segments(action_segment_of)


def nested_collapse_orders(n_segments: int, draws: int, seed: int) -> list[np.ndarray]:
    """One segment permutation per draw; a fraction f collapses its first round(f·K) entries."""
    rng = np.random.default_rng(seed)
    return [rng.permutation(n_segments) for _ in range(draws)]


@dataclass(frozen=True)
class SweepRow:
    fraction: float
    draws: int
    ipwc_profit: float
    spwc_profit: float
    difference: float
    ipwc_iterations: int
    spwc_iterations: float
    all_optimal: bool


def collapse_sweep(
    instance: TargetingInstance,
    menu: ConstraintMenu,
    fractions: list[float],
    draws: int = 5,
    seed: int = 0,
    backend: LPBackend | None = None,
    threads: int = 1,
) -> list[SweepRow]:
    """Average IPwC − SPwC profit per collapse fraction over nested random draws.

    Solves are independent and may run on ``threads`` workers; results are
    collected in submission order, so the rows do not depend on scheduling.
    """
    if draws < 1:
        raise ValueError("draws must be at least 1")
    if any(not 0 <= f <= 1 for f in fractions):
        raise ValueError("fractions must lie in [0, 1]")
    backend = backend or pdhg_backend()
    K = instance.n_segments
    ipwc = backend(compile_ipwc(instance, menu))
    orders = nested_collapse_orders(K, draws, seed)

    jobs = [(f, order[: int(round(f * K))]) for f in fractions for order in orders]

    def run(job: tuple[float, np.ndarray]) -> LPOutcome:
        _, collapsed = job
        return backend(compile_spwc(collapse_action_segments(instance, collapsed), menu))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]

    rows = []
    for i, fraction in enumerate(fractions):
        chunk = outcomes[i * draws:(i + 1) * draws]
        spwc_profit = float(np.mean([o.profit for o in chunk]))
        rows.append(SweepRow(
            fraction=fraction,
            draws=draws,
            ipwc_profit=ipwc.profit,
            spwc_profit=spwc_profit,
            difference=ipwc.profit - spwc_profit,
            ipwc_iterations=ipwc.iterations,
            spwc_iterations=float(np.mean([o.iterations for o in chunk])),
            all_optimal=ipwc.optimal and all(o.optimal for o in chunk),
        ))
        logger.debug("fraction %.2f: difference %.6g", fraction, rows[-1].difference)
    return rows


SWEEP_COLUMNS = ("fraction", "draws", "ipwc_profit", "spwc_profit", "difference",
                 "ipwc_iterations", "spwc_iterations", "all_optimal")


def write_sweep(rows: list[SweepRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([repr(row.fraction), row.draws, repr(row.ipwc_profit),
                             repr(row.spwc_profit), repr(row.difference), row.ipwc_iterations,
                             repr(row.spwc_iterations), str(row.all_optimal).lower()])
