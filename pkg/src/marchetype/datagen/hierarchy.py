"""Zip-code-style segment tree: state → 3-digit → 4-digit → 5-digit.

Leaf segments live at the level picked by ``zip_depth``; two segments are
closer the longer the prefix of their path they share.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

LEVELS = ("state", "zip3", "zip4", "zip5")
DEPTH_LEVELS = {3: 2, 4: 3, 5: 4}  # zip_depth -> number of levels down to the leaves

# Shared levels -> similarity ratio: same 4-digit, same 3-digit, same state, different states.
SIMILARITY_LADDER = {3: 1.1, 2: 1.2, 1: 1.3, 0: 1.4}


@dataclass(frozen=True)
class SegmentHierarchy:
    """Leaf paths of the segment tree.

    Attributes:
        zip_depth: 3, 4 or 5.
        branching: Fan-out per level, from the number of states down.
        paths: One index path per leaf segment (state, zip3, ...).
    """

    zip_depth: int
    branching: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, zip_depth: int, branching: tuple[int, ...]) -> SegmentHierarchy:
        """Full tree with the given fan-outs; missing trailing levels have fan-out 1.

        Raises:
            ValueError: On an unknown depth or a non-positive fan-out.
        """
        if zip_depth not in DEPTH_LEVELS:
            raise ValueError(f"zip_depth must be 3, 4 or 5, got {zip_depth}")
        fanouts = tuple(branching) + (1,) * (len(LEVELS) - len(branching))
        if len(fanouts) > len(LEVELS) or any(b < 1 for b in fanouts):
            raise ValueError(f"branching needs at most {len(LEVELS)} positive fan-outs")
        if fanouts[2] > 10 or fanouts[3] > 10:
            raise ValueError("4- and 5-digit levels append one digit: fan-out at most 10")
        if fanouts[0] * fanouts[1] > 1000:
            raise ValueError("at most 1000 three-digit prefixes")
        n_levels = DEPTH_LEVELS[zip_depth]
        ranges = [range(b) for b in fanouts[:n_levels]]
        return cls(zip_depth, tuple(branching), tuple(itertools.product(*ranges)))

    @property
    def n_segments(self) -> int:
        return len(self.paths)

    def tree_distance(self, k1: int, k2: int) -> int:
        """Number of leading levels the two segments share (0 = different states)."""
        shared = 0
        for a, b in zip(self.paths[k1], self.paths[k2]):
            if a != b:
                break
            shared += 1
        return shared

    def similarity_ratio(self, k1: int, k2: int) -> float:
        """The ratio ladder value for a pair of distinct segments."""
        return SIMILARITY_LADDER[min(self.tree_distance(k1, k2), 3)]

    def labels(self, k: int) -> dict[str, str]:
        """Zip-style labels of segment k at every level down to its leaf."""
        path = self.paths[k]
        fanouts = tuple(self.branching) + (1,) * (len(LEVELS) - len(self.branching))
        out = {"state": f"S{path[0]:02d}"}
        if len(path) > 1:
            out["zip3"] = f"{path[0] * fanouts[1] + path[1]:03d}"
        if len(path) > 2:
            out["zip4"] = out["zip3"] + str(path[2])
        if len(path) > 3:
            out["zip5"] = out["zip4"] + str(path[3])
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "zip_depth": self.zip_depth,
            "branching": list(self.branching),
            "segments": [
                {"segment": k, "path": list(path), **self.labels(k)}
                for k, path in enumerate(self.paths)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SegmentHierarchy:
        try:
            segments = sorted(data["segments"], key=lambda s: s["segment"])
            return cls(
                zip_depth=int(data["zip_depth"]),
                branching=tuple(int(b) for b in data["branching"]),
                paths=tuple(tuple(int(p) for p in s["path"]) for s in segments),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"invalid hierarchy JSON: {e}") from e


def save_hierarchy(hierarchy: SegmentHierarchy, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(hierarchy.to_dict(), f, indent=2)
        f.write("\n")


def load_hierarchy(path: Path) -> SegmentHierarchy:
    with open(path) as f:
        return SegmentHierarchy.from_dict(json.load(f))
