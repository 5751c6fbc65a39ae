"""Benchmark helpers: run manifests and the IPwC/SPwC comparison."""

from .compare import (
    Comparison,
    LPOutcome,
    SweepRow,
    collapse_action_segments,
    collapse_sweep,
    compare_policies,
    nested_collapse_orders,
    oracle_backend,
    pdhg_backend,
    write_sweep,
)
from .manifest import (
    MANIFEST_NAME,
    TIMED_OUTPUTS,
    RunManifest,
    load_manifest,
    sha256_file,
    verify_outputs,
    write_manifest,
)

__all__ = [
    "MANIFEST_NAME",
    "TIMED_OUTPUTS",
    "Comparison",
    "LPOutcome",
    "RunManifest",
    "SweepRow",
    "collapse_action_segments",
    "collapse_sweep",
    "compare_policies",
    "load_manifest",
    "nested_collapse_orders",
    "oracle_backend",
    "pdhg_backend",
    "sha256_file",
    "verify_outputs",
    "write_manifest",
    "write_sweep",
]
