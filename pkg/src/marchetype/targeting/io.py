"""Instance and menu JSON files.

Infinite bounds are written as the strings "inf" / "-inf".
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np

from .models import (
    ActionSimilarity,
    ConstraintMenu,
    InstanceValidationError,
    MenuValidationError,
    SegmentPair,
    TargetingInstance,
    VolumeBound,
    WeightedSimilarity,
    WeightedVolume,
)

logger = logging.getLogger(__name__)


def _encode(value: float) -> float | str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def _decode(value: Any) -> float:
    if isinstance(value, str):
        if value not in ("inf", "-inf", "+inf"):
            raise MenuValidationError(f"unexpected string bound {value!r}")
        return float(value)
    return float(value)


def menu_to_dict(menu: ConstraintMenu) -> dict[str, Any]:
    return {
        "volume1": [
            {"segment": v.segment, "action": v.action, "lower": v.lower, "upper": v.upper}
            for v in menu.volume1
        ],
        "volume2": [
            {
                "lower": [_encode(x) for x in vol.lower],
                "upper": [_encode(x) for x in vol.upper],
                "weights": vol.weights.tolist(),
            }
            for vol in menu.volume2
        ],
        "similarity1": [
            {
                "action": s.action,
                "segment1": s.segment1,
                "segment2": s.segment2,
                "ratio": s.ratio,
                "offset": s.offset,
            }
            for s in menu.similarity1
        ],
        "similarity2": [
            {
                "pairs": [
                    {"segment1": p.segment1, "segment2": p.segment2, "ratio": p.ratio,
                     "offset": p.offset}
                    for p in sim.pairs
                ],
                "weights": sim.weights.tolist(),
            }
            for sim in menu.similarity2
        ],
        "targeting_enabled": menu.targeting_enabled,
    }


def _as_list(value: Any) -> list[Any]:
    # A single family object is accepted as a one-element list.
    if value is None:
        return []
    if isinstance(value, dict):
        return [value]
    return list(value)


def menu_from_dict(data: dict[str, Any]) -> ConstraintMenu:
    """Parse menu JSON.

    Raises:
        MenuValidationError: On missing keys or malformed values.
    """
    try:
        volume1 = tuple(
            VolumeBound(int(v["segment"]), int(v["action"]), float(v["lower"]), float(v["upper"]))
            for v in _as_list(data.get("volume1"))
        )
        volume2 = tuple(
            WeightedVolume(
                lower=np.array([_decode(x) for x in v["lower"]]),
                upper=np.array([_decode(x) for x in v["upper"]]),
                weights=np.asarray(v["weights"], dtype=np.float64),
            )
            for v in _as_list(data.get("volume2"))
        )
        similarity1 = tuple(
            ActionSimilarity(
                int(s["action"]),
                int(s["segment1"]),
                int(s["segment2"]),
                float(s["ratio"]),
                float(s.get("offset", 0.0)),
            )
            for s in _as_list(data.get("similarity1"))
        )
        similarity2 = tuple(
            WeightedSimilarity(
                pairs=tuple(
                    SegmentPair(int(p["segment1"]), int(p["segment2"]), float(p["ratio"]),
                                float(p.get("offset", 0.0)))
                    for p in s["pairs"]
                ),
                weights=np.asarray(s["weights"], dtype=np.float64),
            )
            for s in _as_list(data.get("similarity2"))
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, MenuValidationError):
            raise
        raise MenuValidationError(f"invalid menu JSON: {e}") from e
    return ConstraintMenu(
        volume1=volume1,
        volume2=volume2,
        similarity1=similarity1,
        similarity2=similarity2,
        targeting_enabled=bool(data.get("targeting_enabled", True)),
    )


def _read_json(path: Path, error: type[Exception]) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise error(f"invalid JSON in {path}: {e}") from e


def _write_json(data: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, separators=(",", ":"))
        f.write("\n")


def save_instance(instance: TargetingInstance, path: Path) -> None:
    _write_json(instance.to_dict(), path)
    logger.debug("wrote instance (%d customers) to %s", instance.n_customers, path)


def load_instance(path: Path) -> TargetingInstance:
    """Read an instance file.

    Raises:
        OSError: If the file cannot be read.
        InstanceValidationError: If the content is invalid.
    """
    return TargetingInstance.from_dict(_read_json(path, InstanceValidationError))


def save_menu(menu: ConstraintMenu, path: Path) -> None:
    _write_json(menu_to_dict(menu), path)


def load_menu(path: Path) -> ConstraintMenu:
    return menu_from_dict(_read_json(path, MenuValidationError))


def load_pair_profits(path: Path) -> np.ndarray:
    """Read ``{"pair_profits": [[[...]]]}``."""
    data = _read_json(path, InstanceValidationError)
    try:
        return np.asarray(data["pair_profits"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise InstanceValidationError(f"invalid pair profits in {path}: {e}") from e
