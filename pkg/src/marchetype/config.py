"""Configuration loader.

Loads solver defaults from ~/.marchetype/config.json (or the file named by
MARCHETYPE_CONFIG); command-line flags override what is loaded here.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .solver import SolverConfig

logger = logging.getLogger(__name__)

CONFIG_ENV = "MARCHETYPE_CONFIG"
THREADS_ENV = "MARCHETYPE_THREADS"
DEFAULT_CONFIG_PATH = Path.home() / ".marchetype" / "config.json"

# key -> (type, validator)
_SOLVER_KEYS: dict[str, tuple[type, Any]] = {
    "tolerance": (float, lambda v: v > 0),
    "max_total_iterations": (int, lambda v: v >= 1),
    "max_outer": (int, lambda v: v >= 1),
    "max_inner": (int, lambda v: v >= 1),
    "step_safety": (float, lambda v: 0 < v < 1),
    "rescale": (bool, lambda v: True),
    "power_iterations": (int, lambda v: v >= 1),
    "seed": (int, lambda v: True),
    "check_current_iterate": (bool, lambda v: True),
}


@dataclass
class AppConfig:
    """Configuration for the command-line tool.

    Attributes:
        solver: Solver defaults.
        threads: Worker count for fan-out in ``compare``.
    """

    solver: SolverConfig = field(default_factory=SolverConfig)
    threads: int = 1

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


def config_path() -> Path:
    env = os.getenv(CONFIG_ENV)
    return Path(env).expanduser() if env else DEFAULT_CONFIG_PATH


def threads_from_env(default: int = 1) -> int:
    """MARCHETYPE_THREADS, or ``default`` when unset or invalid."""
    raw = os.getenv(THREADS_ENV)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring invalid %s=%r", THREADS_ENV, raw)
        return default
    return value if value >= 1 else default


def load_config(path: Path | None = None) -> AppConfig:
    """Load AppConfig from a JSON file.

    The config file should have this structure:
    ```json
    {
      "solver": {"tolerance": 1e-6, "step_safety": 0.9, "rescale": true},
      "threads": 1
    }
    ```

    A missing or unreadable file gives defaults. MARCHETYPE_THREADS overrides
    ``threads``.
    """
    path = path or config_path()
    config = AppConfig()

    if not path.exists():
        logger.debug("No config file at %s, using defaults", path)
    else:
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            logger.warning("Invalid JSON in %s: %s. Using defaults.", path, e)
        except OSError as e:
            logger.warning("Cannot read %s: %s. Using defaults.", path, e)
        else:
            config = _parse_config(data) if isinstance(data, dict) else config

    config.threads = threads_from_env(config.threads)
    return config


def _parse_config(data: dict[str, Any]) -> AppConfig:
    """Parse config dictionary into AppConfig; bad values are skipped."""
    solver_data = data.get("solver", {})
    if not isinstance(solver_data, dict):
        solver_data = {}

    kwargs: dict[str, Any] = {}
    for key, (kind, valid) in _SOLVER_KEYS.items():
        if key not in solver_data:
            continue
        value = solver_data[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if (kind is int and isinstance(value, bool)) or not isinstance(value, kind):
            logger.warning("Ignoring solver.%s: expected %s", key, kind.__name__)
            continue
        if not valid(value):
            logger.warning("Ignoring solver.%s: out of range", key)
            continue
        kwargs[key] = value

    threads = data.get("threads", 1)
    if not isinstance(threads, int) or isinstance(threads, bool) or threads < 1:
        threads = 1

    return AppConfig(solver=SolverConfig(**kwargs), threads=threads)


def save_config(config: AppConfig, path: Path | None = None) -> None:
    """Save the non-default parts of AppConfig to a JSON file."""
    path = path or config_path()
    path.parent.mkdir(parents=True, exist_ok=True)

    defaults = SolverConfig().to_dict()
    solver_data = {
        key: value
        for key, value in config.solver.to_dict().items()
        if key in _SOLVER_KEYS and value != defaults[key]
    }
    data: dict[str, Any] = {}
    if solver_data:
        data["solver"] = solver_data
    if config.threads != 1:
        data["threads"] = config.threads

    try:
        with open(path, "w") as f:
            json.dump(data, f, indent=2)
    except OSError as e:
        logger.error("Failed to save config to %s: %s", path, e)
        raise
