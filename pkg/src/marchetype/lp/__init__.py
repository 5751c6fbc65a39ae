"""Standard-form LP type and its file formats."""

from .mps import MPSParseError, load_mps, read_mps, save_mps, write_mps
from .standard import (
    ColumnLabel,
    LPFormatError,
    StandardLP,
    VariableKind,
    load_lp,
    save_lp,
    unit_box_lp,
)

__all__ = [
    "ColumnLabel",
    "LPFormatError",
    "MPSParseError",
    "StandardLP",
    "VariableKind",
    "load_lp",
    "load_mps",
    "read_mps",
    "save_lp",
    "save_mps",
    "unit_box_lp",
    "write_mps",
]
