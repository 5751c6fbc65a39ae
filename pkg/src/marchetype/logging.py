"""Structured JSONL event log for CLI runs and solves.

One JSON object per line in ``<log_dir>/logs.jsonl``. Entries of one CLI
invocation share a ``run_id``. Full files roll over to ``logs.1.jsonl``,
``logs.2.jsonl``, ... keeping ``backups`` old files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

LOG_DIR_ENV = "MARCHETYPE_LOG_DIR"


def default_log_dir() -> Path:
    env = os.getenv(LOG_DIR_ENV)
    if env:
        return Path(env).expanduser()
    return Path.home() / ".marchetype" / "logs"


def _plain(value: Any) -> Any:
    """numpy scalars/arrays to JSON types; non-finite floats to strings."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class LogEntry:
    """One event line. Unset header fields are left out of the JSON."""

    event: str
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    run_id: str | None = None
    command: str | None = None
    argv: list[str] | None = None
    status: str | None = None
    exit_code: int | None = None
    duration_ms: float | None = None
    error: str | None = None
    data: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"timestamp": self.timestamp, "event": self.event}
        for key in ("run_id", "command", "argv", "status", "exit_code", "duration_ms", "error"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.data:
            out["data"] = self.data
        return _plain(out)


class JSONLLogger:
    """Appends LogEntry lines to a size-capped file."""

    def __init__(
        self,
        log_dir: str | Path | None = None,
        filename: str = "logs.jsonl",
        max_size_mb: float = 10.0,
        backups: int = 5,
    ) -> None:
        self.log_dir = Path(log_dir) if log_dir is not None else default_log_dir()
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.filename = filename
        self.max_size_bytes = int(max_size_mb * 1024 * 1024)
        self.backups = backups
        self.run_id: str | None = None

    @property
    def log_path(self) -> Path:
        return self.log_dir / self.filename

    def set_run_id(self, run_id: str | None) -> None:
        """Stamp ``run_id`` on every later entry that does not carry its own."""
        self.run_id = run_id

    def _backup_path(self, n: int) -> Path:
        stem, suffix = os.path.splitext(self.filename)
        return self.log_dir / f"{stem}.{n}{suffix}"

    def _roll_over(self) -> None:
        oldest = self._backup_path(self.backups)
        oldest.unlink(missing_ok=True)
        for n in range(self.backups - 1, 0, -1):
            src = self._backup_path(n)
            if src.exists():
                src.rename(self._backup_path(n + 1))
        if self.backups > 0:
            self.log_path.rename(self._backup_path(1))
        else:
            self.log_path.unlink()

    def write(self, entry: LogEntry) -> None:
        if self.log_path.exists() and self.log_path.stat().st_size >= self.max_size_bytes:
            self._roll_over()
        if entry.run_id is None:
            entry.run_id = self.run_id
        with open(self.log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry.to_dict()) + "\n")

    def log(
        self,
        event: str,
        *,
        run_id: str | None = None,
        status: str | None = None,
        **data: Any,
    ) -> None:
        """Free-form event; other keyword arguments land under ``data``."""
        self.write(LogEntry(event=event, run_id=run_id, status=status, data=data))

    def log_command(
        self,
        argv: list[str],
        exit_code: int,
        duration_ms: float,
        *,
        command: str | None = None,
        error: str | None = None,
    ) -> None:
        self.write(LogEntry(
            event="command",
            command=command,
            argv=list(argv),
            exit_code=exit_code,
            duration_ms=duration_ms,
            error=error,
        ))

    def log_solve_start(self, n_vars: int, n_rows: int, nnz: int, config: dict[str, Any]) -> None:
        self.write(LogEntry(
            event="solve_start",
            data={"n_vars": n_vars, "n_rows": n_rows, "nnz": nnz, "config": config},
        ))

    def log_restart(self, outer: int, inner: int, reason: str, gap: float) -> None:
        self.write(LogEntry(
            event="restart",
            data={"outer": outer, "inner": inner, "reason": reason, "gap": gap},
        ))

    def log_solve_end(
        self,
        status: str,
        iterations: int,
        restarts: int,
        *,
        objective: float | None = None,
        duration_ms: float | None = None,
    ) -> None:
        data: dict[str, Any] = {"iterations": iterations, "restarts": restarts}
        if objective is not None:
            data["objective"] = objective
        self.write(LogEntry(event="solve_end", status=status, duration_ms=duration_ms, data=data))


_logger: JSONLLogger | None = None


def get_logger() -> JSONLLogger:
    """Process-wide logger, created on first use."""
    global _logger
    if _logger is None:
        _logger = JSONLLogger()
    return _logger


def configure_logger(log_dir: str | Path | None = None, max_size_mb: float = 10.0) -> JSONLLogger:
    """Replace the process-wide logger."""
    global _logger
    _logger = JSONLLogger(log_dir=log_dir, max_size_mb=max_size_mb)
    return _logger
