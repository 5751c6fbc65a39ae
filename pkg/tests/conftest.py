"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from marchetype.lp import StandardLP, unit_box_lp
from marchetype.sparse import SparseMatrix
from marchetype.targeting import ConstraintMenu, TargetingInstance, VolumeBound


@pytest.fixture(autouse=True)
def isolated_logs(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Keep JSONL logs and config lookups inside the test's tmp dir."""
    log_dir = tmp_path / "logs"
    monkeypatch.setenv("MARCHETYPE_LOG_DIR", str(log_dir))
    monkeypatch.setenv("MARCHETYPE_CONFIG", str(tmp_path / "no-config.json"))
    monkeypatch.delenv("MARCHETYPE_THREADS", raising=False)
    return log_dir


def knapsack_lp() -> StandardLP:
    """max 3x1 + 2x2 s.t. x1 + x2 <= 1 on the unit box; optimum x = (1, 0)."""
    return unit_box_lp(
        objective=np.array([-3.0, -2.0]),
        rows=np.array([0, 0]),
        cols=np.array([0, 1]),
        vals=np.array([1.0, 1.0]),
        rhs=np.array([1.0]),
    )


def fractional_lp() -> StandardLP:
    """Optimum (1, 0.5) with value -4: min -3x1 - 2x2 s.t. 2x1 + 2x2 <= 3."""
    return unit_box_lp(
        objective=np.array([-3.0, -2.0]),
        rows=np.array([0, 0]),
        cols=np.array([0, 1]),
        vals=np.array([2.0, 2.0]),
        rhs=np.array([3.0]),
    )


@pytest.fixture
def knapsack() -> StandardLP:
    return knapsack_lp()


@pytest.fixture
def fractional() -> StandardLP:
    return fractional_lp()


@pytest.fixture
def small_matrix() -> SparseMatrix:
    """[[1, 0, 2], [0, 0, 3]]."""
    return SparseMatrix.from_dense(np.array([[1.0, 0.0, 2.0], [0.0, 0.0, 3.0]]))


@pytest.fixture
def tiny_instance() -> TargetingInstance:
    """Four customers, two segments, two actions."""
    return TargetingInstance(
        profits=np.array([[5.0, 1.0], [4.0, -1.0], [-2.0, 3.0], [1.0, 2.0]]),
        constraint_segment_of=np.array([0, 0, 1, 1]),
        action_segment_of=np.array([0, 0, 1, 1]),
        max_actions=np.array([1, 1, 1, 1]),
    )


@pytest.fixture
def tiny_menu() -> ConstraintMenu:
    return ConstraintMenu(volume1=(VolumeBound(segment=0, action=0, lower=0.0, upper=1.0),))


@pytest.fixture
def trivial_lp() -> StandardLP:
    """min -5x s.t. x <= 1, 0 <= x <= 1."""
    return unit_box_lp(np.array([-5.0]), np.array([0]), np.array([0]), np.array([1.0]),
                       np.array([1.0]))
