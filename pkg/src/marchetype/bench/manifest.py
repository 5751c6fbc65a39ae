"""Run manifests: what a command was run with and what it produced."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

MANIFEST_NAME = "manifest.json"
TIMING_FIELDS = ("started_at", "finished_at")
# Outputs carrying wall-clock columns; their bytes differ between runs.
TIMED_OUTPUTS = frozenset({"convergence_log"})


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    """One command invocation.

    Attributes:
        command: Sub-command name.
        argv: Arguments after the program name; replaying them reruns the command.
        config: Effective configuration snapshot.
        inputs: Input name -> path.
        outputs: Output name -> {"path", "sha256"}.
        seed: Random seed, when the command uses one.
        version: Package version.
    """

    command: str
    argv: list[str]
    version: str
    config: dict[str, Any] = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, dict[str, str]] = field(default_factory=dict)
    seed: int | None = None
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None

    def add_input(self, name: str, path: Path) -> None:
        self.inputs[name] = str(path)

    def add_output(self, name: str, path: Path) -> None:
        """Record an output file with its digest (call after it is written)."""
        self.outputs[name] = {"path": str(path), "sha256": sha256_file(path)}

    def finish(self) -> None:
        self.finished_at = _now()

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def reproducible_view(self) -> dict[str, Any]:
        """The manifest without timing fields."""
        return {k: v for k, v in self.to_dict().items() if k not in TIMING_FIELDS}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunManifest:
        try:
            return cls(
                command=str(data["command"]),
                argv=[str(a) for a in data["argv"]],
                version=str(data.get("version", "")),
                config=dict(data.get("config", {})),
                inputs=dict(data.get("inputs", {})),
                outputs=dict(data.get("outputs", {})),
                seed=data.get("seed"),
                started_at=str(data.get("started_at", "")),
                finished_at=data.get("finished_at"),
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"invalid manifest: {e}") from e


def write_manifest(manifest: RunManifest, path: Path) -> Path:
    """Write atomically: a temp file in the target directory, then os.replace."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".manifest-", suffix=".json", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(manifest.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def load_manifest(path: Path) -> RunManifest:
    with open(path, encoding="utf-8") as f:
        return RunManifest.from_dict(json.load(f))


def verify_outputs(manifest: RunManifest,
                   skip: frozenset[str] = TIMED_OUTPUTS) -> dict[str, bool]:
    """Output name -> whether the file on disk still matches its recorded digest.

    Outputs named in ``skip`` are left out.
    """
    result = {}
    for name, record in manifest.outputs.items():
        if name in skip:
            continue
        path = Path(record["path"])
        result[name] = path.exists() and sha256_file(path) == record["sha256"]
    return result
