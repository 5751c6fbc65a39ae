"""Restarted primal-dual hybrid gradient solver."""

from .convergence_log import ConvergenceLogger
from .pdhg import (
    KKTResiduals,
    SaddleState,
    dual_objective,
    kkt_residuals,
    normalized_duality_gap,
    pdhg_step,
)
from .problem import SaddleProblem, project_dual, project_primal
from .restart import (
    RestartedPDHG,
    RestartReason,
    SolveObserver,
    SolverConfig,
    SolverError,
    SolveReport,
    SolveStatus,
    solve,
    step_size,
)
from .toy import ToyConfig, ToyReport, ToyRun, run_toy, write_trajectories

__all__ = [
    "ConvergenceLogger",
    "KKTResiduals",
    "RestartReason",
    "RestartedPDHG",
    "SaddleProblem",
    "SaddleState",
    "SolveObserver",
    "SolveReport",
    "SolveStatus",
    "SolverConfig",
    "SolverError",
    "ToyConfig",
    "ToyReport",
    "ToyRun",
    "dual_objective",
    "kkt_residuals",
    "normalized_duality_gap",
    "pdhg_step",
    "project_dual",
    "project_primal",
    "run_toy",
    "solve",
    "step_size",
]
