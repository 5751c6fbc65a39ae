"""The bilinear toy saddle min_x max_y x·y, run with and without restarts.

Boxes are wide enough that projections stay inactive near the spiral, so
the one-loop average and the two-loop scheme can be compared directly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..sparse import SparseMatrix
from .pdhg import KKTResiduals
from .problem import SaddleProblem
from .restart import LoopResult, RestartedPDHG, SolverConfig, SolveStatus


@dataclass
class ToyConfig:
    """Toy experiment settings.

    Attributes:
        start: Initial (x, y).
        x_box: Primal box (lower, upper).
        y_box: Dual box (lower, upper).
        step: η = τ (the coupling matrix has norm 1).
        restarted_tolerance: ℓ∞ distance to the saddle for the two-loop run.
        averaged_tolerance: ℓ∞ distance to the saddle for the one-loop run.
        max_iterations: Cap per run.
    """

    start: tuple[float, float] = (5.0, 5.0)
    x_box: tuple[float, float] = (-100.0, 100.0)
    y_box: tuple[float, float] = (-100.0, 100.0)
    step: float = 0.9
    restarted_tolerance: float = 1e-6
    averaged_tolerance: float = 1e-4
    max_iterations: int = 2_000_000
    max_inner: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.step < 1:
            raise ValueError("step must lie in (0, 1) for the unit coupling")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        for name in ("x_box", "y_box"):
            low, high = getattr(self, name)
            if low > high:
                raise ValueError(f"{name} is empty")
        if not (self.x_box[0] <= self.start[0] <= self.x_box[1]
                and self.y_box[0] <= self.start[1] <= self.y_box[1]):
            raise ValueError("start must lie inside the boxes")


@dataclass
class ToyRun:
    variant: str
    status: SolveStatus
    iterations: int
    restarts: int
    final: tuple[float, float]
    trajectory: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def distance(self) -> float:
        return max(abs(self.final[0]), abs(self.final[1]))


@dataclass
class ToyReport:
    one_loop: ToyRun
    two_loop: ToyRun


def toy_problem(config: ToyConfig) -> SaddleProblem:
    """L(x, y) = x·y over the configured boxes."""
    return SaddleProblem(
        objective=np.zeros(1),
        matrix=SparseMatrix.identity(1),
        rhs=np.zeros(1),
        x_lower=np.array([config.x_box[0]]),
        x_upper=np.array([config.x_box[1]]),
        y_lower=np.array([config.y_box[0]]),
        y_upper=np.array([config.y_box[1]]),
    )


def _distance_to_origin(x: np.ndarray, y: np.ndarray) -> tuple[KKTResiduals, float]:
    d = max(float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    return KKTResiduals(d, d, d), float(x[0] * y[0])


def _run(config: ToyConfig, restart: bool) -> ToyRun:
    solver_config = SolverConfig(
        tolerance=config.restarted_tolerance if restart else config.averaged_tolerance,
        max_total_iterations=config.max_iterations,
        max_inner=config.max_inner,
        restart=restart,
        check_current_iterate=False,
    )
    problem = toy_problem(config)
    runner = RestartedPDHG(problem, config.step, config.step, solver_config,
                           _distance_to_origin, record_trajectory=True)
    result: LoopResult = runner.run(np.array([config.start[0]]), np.array([config.start[1]]))
    return ToyRun(
        variant="two_loop" if restart else "one_loop",
        status=result.status,
        iterations=result.iterations,
        restarts=result.restarts,
        final=(float(result.x[0]), float(result.y[0])),
        trajectory=[(outer, float(x[0]), float(y[0])) for outer, x, y in result.trajectory],
    )


def run_toy(config: ToyConfig | None = None) -> ToyReport:
    """Run the one-loop averaged and the two-loop restarted variants."""
    config = config or ToyConfig()
    return ToyReport(one_loop=_run(config, restart=False), two_loop=_run(config, restart=True))


def write_trajectories(report: ToyReport, path: Path) -> None:
    """CSV with columns variant,iteration,outer,x,y (averaged iterates)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["variant", "iteration", "outer", "x", "y"])
        for run in (report.one_loop, report.two_loop):
            for iteration, (outer, x, y) in enumerate(run.trajectory, start=1):
                writer.writerow([run.variant, iteration, outer, repr(x), repr(y)])
