"""Free-format MPS export and import.

Export writes one N row (``COST``) and one L row per inequality; the box
bounds go to the BOUNDS section as ``UP``/``LO`` entries. RANGES is never
written. Import accepts N/L/G/E rows and UP/LO/FX/FR/MI/BV bounds and folds
everything back into ``Gx <= h`` form.
"""

from __future__ import annotations

from pathlib import Path
from typing import TextIO

import numpy as np
from scipy import sparse as sp

from .standard import LPFormatError, StandardLP
from ..sparse import csr_from_arrays

SECTIONS = ("NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA")


class MPSParseError(LPFormatError):
    """Raised when an MPS file cannot be parsed."""

    pass


def _fmt(value: float) -> str:
    return repr(float(value))


def write_mps(lp: StandardLP, stream: TextIO, name: str = "MARCHETYPE") -> None:
    """Write ``lp`` as free MPS to a text stream."""
    matrix = lp.constraints
    csc = sp.csr_array(
        (matrix.values, matrix.col_indices, matrix.row_offsets), shape=matrix.shape
    ).tocsc()

    stream.write(f"NAME {name}\n")
    stream.write("ROWS\n")
    stream.write(" N COST\n")
    for row in range(lp.n_rows):
        stream.write(f" L R{row}\n")

    stream.write("COLUMNS\n")
    for col in range(lp.n_vars):
        if lp.objective[col] != 0.0:
            stream.write(f" C{col} COST {_fmt(lp.objective[col])}\n")
        start, stop = csc.indptr[col], csc.indptr[col + 1]
        for row, value in zip(csc.indices[start:stop], csc.data[start:stop]):
            stream.write(f" C{col} R{row} {_fmt(value)}\n")
        if lp.objective[col] == 0.0 and start == stop:
            # Keep empty columns visible so the reader sees every variable.
            stream.write(f" C{col} COST 0.0\n")

    stream.write("RHS\n")
    for row in np.flatnonzero(lp.rhs):
        stream.write(f" RHS R{row} {_fmt(lp.rhs[row])}\n")

    stream.write("BOUNDS\n")
    for col in range(lp.n_vars):
        lower, upper = lp.var_lower[col], lp.var_upper[col]
        if np.isfinite(upper):
            stream.write(f" UP BND C{col} {_fmt(upper)}\n")
        if np.isfinite(lower):
            stream.write(f" LO BND C{col} {_fmt(lower)}\n")
        elif np.isinf(upper):
            stream.write(f" FR BND C{col}\n")
        else:
            stream.write(f" MI BND C{col}\n")
    stream.write("ENDATA\n")


def save_mps(lp: StandardLP, path: Path, name: str = "MARCHETYPE") -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        write_mps(lp, f, name=name)


def read_mps(stream: TextIO) -> StandardLP:
    """Parse free MPS into a StandardLP.

    Raises:
        MPSParseError: On unknown sections, undeclared rows/columns, RANGES,
            or malformed lines.
    """
    row_types: dict[str, str] = {}
    row_order: list[str] = []
    objective_row: str | None = None
    col_index: dict[str, int] = {}
    entries: list[tuple[str, int, float]] = []
    objective: dict[int, float] = {}
    rhs: dict[str, float] = {}
    lower: dict[int, float] = {}
    upper: dict[int, float] = {}
    section: str | None = None

    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("*"):
            continue
        tokens = line.split()
        head = tokens[0]
        if head in SECTIONS and (len(tokens) == 1 or head == "NAME"):
            section = head
            if head == "ENDATA":
                break
            if head == "RANGES":
                raise MPSParseError(f"line {lineno}: RANGES section is not supported")
            continue

        try:
            if section == "ROWS":
                kind, row_name = tokens[0].upper(), tokens[1]
                if kind not in ("N", "L", "G", "E"):
                    raise MPSParseError(f"line {lineno}: unknown row type {kind!r}")
                if kind == "N":
                    if objective_row is None:
                        objective_row = row_name
                    row_types[row_name] = "N"
                    continue
                row_types[row_name] = kind
                row_order.append(row_name)
            elif section == "COLUMNS":
                if len(tokens) > 1 and tokens[1] == "'MARKER'":
                    raise MPSParseError(f"line {lineno}: integer markers are not supported")
                col = col_index.setdefault(tokens[0], len(col_index))
                for i in range(1, len(tokens) - 1, 2):
                    row_name, value = tokens[i], float(tokens[i + 1])
                    if row_name not in row_types:
                        raise MPSParseError(f"line {lineno}: undeclared row {row_name!r}")
                    if row_name == objective_row:
                        objective[col] = objective.get(col, 0.0) + value
                    elif row_types[row_name] != "N":
                        entries.append((row_name, col, value))
            elif section == "RHS":
                body = tokens[1:] if len(tokens) % 2 == 1 else tokens
                for i in range(0, len(body) - 1, 2):
                    row_name = body[i]
                    if row_name not in row_types:
                        raise MPSParseError(f"line {lineno}: undeclared row {row_name!r}")
                    rhs[row_name] = float(body[i + 1])
            elif section == "BOUNDS":
                kind, col_name = tokens[0].upper(), tokens[2]
                if col_name not in col_index:
                    raise MPSParseError(f"line {lineno}: undeclared column {col_name!r}")
                col = col_index[col_name]
                if kind == "UP":
                    upper[col] = float(tokens[3])
                elif kind == "LO":
                    lower[col] = float(tokens[3])
                elif kind == "FX":
                    lower[col] = upper[col] = float(tokens[3])
                elif kind == "FR":
                    lower[col], upper[col] = -np.inf, np.inf
                elif kind == "MI":
                    lower[col] = -np.inf
                elif kind == "BV":
                    lower[col], upper[col] = 0.0, 1.0
                else:
                    raise MPSParseError(f"line {lineno}: unknown bound type {kind!r}")
            else:
                raise MPSParseError(f"line {lineno}: data outside of a section")
        except (IndexError, ValueError) as e:
            if isinstance(e, MPSParseError):
                raise
            raise MPSParseError(f"line {lineno}: malformed line {line!r}") from e

    return _assemble(row_types, row_order, col_index, entries, objective, rhs, lower, upper)


def _assemble(
    row_types: dict[str, str],
    row_order: list[str],
    col_index: dict[str, int],
    entries: list[tuple[str, int, float]],
    objective: dict[int, float],
    rhs: dict[str, float],
    lower: dict[int, float],
    upper: dict[int, float],
) -> StandardLP:
    # Each source row becomes one (L, G) or two (E) output rows.
    out_rows: dict[str, list[tuple[int, float]]] = {}
    n_out = 0
    for row_name in row_order:
        kind = row_types[row_name]
        if kind == "L":
            out_rows[row_name] = [(n_out, 1.0)]
            n_out += 1
        elif kind == "G":
            out_rows[row_name] = [(n_out, -1.0)]
            n_out += 1
        else:
            out_rows[row_name] = [(n_out, 1.0), (n_out + 1, -1.0)]
            n_out += 2

    rows, cols, vals = [], [], []
    for row_name, col, value in entries:
        for out, sign in out_rows[row_name]:
            rows.append(out)
            cols.append(col)
            vals.append(sign * value)
    h = np.zeros(n_out)
    for row_name, value in rhs.items():
        for out, sign in out_rows.get(row_name, []):
            h[out] = sign * value

    n_cols = len(col_index)
    p = np.zeros(n_cols)
    for col, value in objective.items():
        p[col] = value
    lo = np.zeros(n_cols)
    hi = np.full(n_cols, np.inf)
    for col, value in lower.items():
        lo[col] = value
    for col, value in upper.items():
        hi[col] = value

    matrix = csr_from_arrays(n_out, n_cols, np.array(rows), np.array(cols), np.array(vals))
    return StandardLP(objective=p, constraints=matrix, rhs=h, var_lower=lo, var_upper=hi)


def load_mps(path: Path) -> StandardLP:
    with open(path, "r", encoding="utf-8") as f:
        return read_mps(f)
