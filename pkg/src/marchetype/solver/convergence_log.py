"""Convergence log for detailed analysis of a solve.

One CSV row per gap evaluation. Restarts are kept in memory so callers can
forward them (the CLI sends them to the JSONL log).
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import TextIO

from .pdhg import KKTResiduals
from .restart import RestartReason

COLUMNS = ("total_iter", "outer", "inner", "primal_res", "dual_res", "rel_gap", "rho",
           "objective", "elapsed_s")


class ConvergenceLogger:
    """Writes the convergence CSV; usable as a solve observer."""

    def __init__(self, path: Path | str, include_timing: bool = True) -> None:
        """Open the CSV and write the header.

        Args:
            path: Output file; parent directories are created.
            include_timing: When False, elapsed_s is written as 0 so reruns
                are byte-identical.
        """
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.include_timing = include_timing
        self.rows_written = 0
        self.restarts: list[tuple[int, int, RestartReason, float]] = []
        self._file: TextIO | None = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file)
        self._writer.writerow(COLUMNS)

    def on_evaluation(self, total_iter: int, outer: int, inner: int, residuals: KKTResiduals,
                      rho: float, objective: float, elapsed_s: float) -> None:
        """Log one gap evaluation."""
        if self._file is None:
            raise ValueError(f"convergence log {self.path} is closed")
        self._writer.writerow([
            total_iter,
            outer,
            inner,
            repr(residuals.primal),
            repr(residuals.dual),
            repr(residuals.relative_gap),
            repr(rho),
            repr(objective),
            f"{elapsed_s:.6f}" if self.include_timing else "0",
        ])
        self.rows_written += 1

    def on_restart(self, outer: int, inner: int, reason: RestartReason, gap: float) -> None:
        self.restarts.append((outer, inner, reason, gap))

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self) -> ConvergenceLogger:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
