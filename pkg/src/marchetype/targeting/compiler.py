"""Compile targeting problems into the solver's standard LP form.

Rows are emitted in a fixed family order so dual variables stay attributable:
volume1, volume2, similarity1, similarity2, targeting (and, for the
interdependent formulation, linking). Two-sided bounds become two one-sided
rows; an infinite bound emits no row. The [0, 1] box is carried as variable
bounds.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from ..lp import ColumnLabel, StandardLP, VariableKind, unit_box_lp
from .models import ConstraintMenu, TargetingError, TargetingInstance

logger = logging.getLogger(__name__)

FAMILY_ORDER = ("volume1", "volume2", "similarity1", "similarity2", "targeting")

ColumnMap = Callable[[np.ndarray, np.ndarray], np.ndarray]


class CompileError(TargetingError):
    """Raised when a menu cannot be compiled against an instance."""

    pass


class _RowBuilder:
    """Accumulates coordinate triplets row block by row block.

    Customer-level coefficients are mapped to columns through ``column_of``;
    when several customers share a column (SPwC) the duplicates are summed at
    assembly time.
    """

    def __init__(self, instance: TargetingInstance, column_of: ColumnMap):
        self.instance = instance
        self.column_of = column_of
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []
        self._rhs: list[np.ndarray] = []
        self.n_rows = 0
        self.blocks: dict[str, tuple[int, int]] = {}
        self._block_start = 0

        order = np.argsort(instance.constraint_segment_of, kind="stable")
        bounds = np.concatenate(([0], np.cumsum(instance.segment_sizes)))
        self._members = [order[bounds[k]:bounds[k + 1]] for k in range(instance.n_segments)]

    def members(self, k: int) -> np.ndarray:
        return self._members[k]

    def begin(self) -> None:
        self._block_start = self.n_rows

    def end(self, family: str) -> None:
        self.blocks[family] = (self._block_start, self.n_rows)

    def add_rows(self, local_rows: np.ndarray, cols: np.ndarray, vals: np.ndarray,
                 rhs: np.ndarray) -> None:
        """Append ``len(rhs)`` rows given column coordinates directly."""
        rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
        self._rows.append(np.asarray(local_rows, dtype=np.int64) + self.n_rows)
        self._cols.append(np.asarray(cols, dtype=np.int64))
        self._vals.append(np.asarray(vals, dtype=np.float64))
        self._rhs.append(rhs)
        self.n_rows += rhs.shape[0]

    def add_customer_row(self, customers: np.ndarray, actions: np.ndarray,
                         coefs: np.ndarray, rhs: float) -> None:
        """Append one row written over per-customer x_i^j."""
        cols = self.column_of(customers, actions)
        self.add_rows(np.zeros(cols.shape[0], dtype=np.int64), cols, coefs, rhs)

    def segment_mean_terms(self, k: int, weights: np.ndarray | None, action: int | None,
                           scale: float, family: str) -> tuple[np.ndarray, ...]:
        """Coefficients of scale · (1/n_k) Σ_{i∈S_k} (weighted) x_i^j."""
        members = self.members(k)
        if members.shape[0] == 0:
            raise CompileError(f"{family}: segment {k} is empty, per-capita term undefined")
        n_k = members.shape[0]
        J = self.instance.n_actions
        if action is not None:
            actions = np.full(n_k, action, dtype=np.int64)
            return members, actions, np.full(n_k, scale / n_k)
        customers = np.repeat(members, J)
        actions = np.tile(np.arange(J), n_k)
        coefs = weights[members].ravel() * (scale / n_k)
        return customers, actions, coefs

    def emit_menu(self, menu: ConstraintMenu) -> None:
        """Emit volume and similarity families in order."""
        instance = self.instance

        self.begin()
        for v in menu.volume1:
            members = self.members(v.segment)
            actions = np.full(members.shape[0], v.action, dtype=np.int64)
            ones = np.ones(members.shape[0])
            self.add_customer_row(members, actions, ones, v.upper)
            self.add_customer_row(members, actions, -ones, -v.lower)
        self.end("volume1")

        self.begin()
        J = instance.n_actions
        for vol in menu.volume2:
            for k in range(instance.n_segments):
                members = self.members(k)
                customers = np.repeat(members, J)
                actions = np.tile(np.arange(J), members.shape[0])
                coefs = vol.weights[members].ravel()
                if np.isfinite(vol.upper[k]):
                    self.add_customer_row(customers, actions, coefs, vol.upper[k])
                if np.isfinite(vol.lower[k]):
                    self.add_customer_row(customers, actions, -coefs, -vol.lower[k])
        self.end("volume2")

        self.begin()
        for s in menu.similarity1:
            first = self.segment_mean_terms(s.segment1, None, s.action, 1.0, "similarity1")
            second = self.segment_mean_terms(s.segment2, None, s.action, -s.ratio, "similarity1")
            self.add_customer_row(*(np.concatenate(p) for p in zip(first, second)), s.offset)
        self.end("similarity1")

        self.begin()
        for sim in menu.similarity2:
            for pair in sim.pairs:
                first = self.segment_mean_terms(pair.segment1, sim.weights, None, 1.0,
                                                "similarity2")
                second = self.segment_mean_terms(pair.segment2, sim.weights, None, -pair.ratio,
                                                 "similarity2")
                self.add_customer_row(*(np.concatenate(p) for p in zip(first, second)),
                                      pair.offset)
        self.end("similarity2")

    def build(self, objective: np.ndarray, labels: tuple[ColumnLabel, ...]) -> StandardLP:
        def cat(parts: list[np.ndarray], dtype: type) -> np.ndarray:
            return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype=dtype)

        return unit_box_lp(
            objective,
            cat(self._rows, np.int64),
            cat(self._cols, np.int64),
            cat(self._vals, np.float64),
            cat(self._rhs, np.float64),
            column_labels=labels,
            row_blocks=dict(self.blocks),
        )


def _customer_action_labels(kind: VariableKind, n_owners: int, n_actions: int,
                            ) -> list[ColumnLabel]:
    return [ColumnLabel(kind, i, j) for i in range(n_owners) for j in range(n_actions)]


def compile_ipwc(instance: TargetingInstance, menu: ConstraintMenu) -> StandardLP:
    """Individual personalization with constraints: one column per (i, j).

    Column w = i·J + j, objective −p_i^j.

    Raises:
        MenuValidationError: If the menu is inconsistent with the instance.
        CompileError: If a similarity row references an empty segment.
    """
    menu.validate(instance)
    I, J = instance.n_customers, instance.n_actions
    builder = _RowBuilder(instance, lambda cust, act: cust * J + act)
    builder.emit_menu(menu)

    builder.begin()
    if menu.targeting_enabled:
        builder.add_rows(np.repeat(np.arange(I), J), np.arange(I * J), np.ones(I * J),
                         instance.max_actions)
    builder.end("targeting")

    lp = builder.build(
        -instance.profits.ravel(),
        tuple(_customer_action_labels(VariableKind.CUSTOMER_ACTION, I, J)),
    )
    logger.debug("compiled IPwC LP: %d rows, %d columns, %d nonzeros",
                 lp.n_rows, lp.n_vars, lp.constraints.nnz)
    return lp


def segment_caps(instance: TargetingInstance) -> np.ndarray:
    """M_{k*}: the smallest M_i within each action segment (J for empty segments)."""
    caps = np.full(instance.n_action_segments, float(instance.n_actions))
    np.minimum.at(caps, instance.action_segment_of, instance.max_actions)
    return caps


def compile_spwc(instance: TargetingInstance, menu: ConstraintMenu) -> StandardLP:
    """Segment personalization with constraints: one column per (k*, j).

    Every menu row is the IPwC row with x_i^j replaced by x_{k*(i)}^j, so a
    column's coefficient is the sum of its members' coefficients.
    """
    menu.validate(instance)
    J = instance.n_actions
    K_star = instance.n_action_segments
    segment_of = instance.action_segment_of
    builder = _RowBuilder(instance, lambda cust, act: segment_of[cust] * J + act)
    builder.emit_menu(menu)

    builder.begin()
    if menu.targeting_enabled:
        builder.add_rows(np.repeat(np.arange(K_star), J), np.arange(K_star * J),
                         np.ones(K_star * J), segment_caps(instance))
    builder.end("targeting")

    objective = np.zeros((K_star, J))
    np.add.at(objective, segment_of, instance.profits)
    lp = builder.build(
        -objective.ravel(),
        tuple(_customer_action_labels(VariableKind.SEGMENT_ACTION, K_star, J)),
    )
    logger.debug("compiled SPwC LP: %d action segments, %d rows", K_star, lp.n_rows)
    return lp


def action_pairs(n_actions: int) -> list[tuple[int, int]]:
    """All (j1, j2) with j1 < j2, in lexicographic order."""
    return [(j1, j2) for j1 in range(n_actions) for j2 in range(j1 + 1, n_actions)]


def compile_interdependent(
    instance: TargetingInstance,
    menu: ConstraintMenu,
    pair_profits: np.ndarray,
) -> StandardLP:
    """Interdependent actions: at most two actions per customer, pairs priced jointly.

    Column blocks, in order: z_i^j (I·J), y_i^{j1,j2} (I·P with P = J(J−1)/2),
    auxiliary x_i^j (I·J). Menu rows are written over the x block; the linking
    equality x = z + Σ y is emitted as two rows per (i, j) after targeting.

    Raises:
        CompileError: If pair_profits is not I x J x J or not finite.
    """
    menu.validate(instance)
    I, J = instance.n_customers, instance.n_actions
    q = np.asarray(pair_profits, dtype=np.float64)
    if q.shape != (I, J, J):
        raise CompileError(f"pair_profits must have shape {(I, J, J)}, got {q.shape}")
    if not np.all(np.isfinite(q)):
        raise CompileError("pair_profits must be finite")

    pairs = action_pairs(J)
    P = len(pairs)
    y_offset = I * J
    x_offset = I * J + I * P
    builder = _RowBuilder(instance, lambda cust, act: x_offset + cust * J + act)
    builder.emit_menu(menu)

    builder.begin()
    if menu.targeting_enabled:
        per_customer = J + P
        z_cols = (np.arange(I)[:, None] * J + np.arange(J)).reshape(I, J)
        y_cols = y_offset + (np.arange(I)[:, None] * P + np.arange(P)).reshape(I, P)
        cols = np.hstack((z_cols, y_cols)).ravel()
        builder.add_rows(np.repeat(np.arange(I), per_customer), cols,
                         np.ones(I * per_customer), np.ones(I))
    builder.end("targeting")

    # x_i^j - z_i^j - Σ_{pairs containing j} y_i^pair <= 0, then its negation.
    builder.begin()
    pairs_of = [[p for p, (j1, j2) in enumerate(pairs) if j in (j1, j2)] for j in range(J)]
    rows, cols, vals = [], [], []
    for i in range(I):
        for j in range(J):
            local = 2 * (i * J + j)
            row_cols = [x_offset + i * J + j, i * J + j]
            row_cols += [y_offset + i * P + p for p in pairs_of[j]]
            signs = [1.0] + [-1.0] * (len(row_cols) - 1)
            rows += [local] * len(row_cols) + [local + 1] * len(row_cols)
            cols += row_cols * 2
            vals += signs + [-s for s in signs]
    builder.add_rows(np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64),
                     np.asarray(vals), np.zeros(2 * I * J))
    builder.end("linking")

    pair_objective = np.array([[q[i, j1, j2] for j1, j2 in pairs] for i in range(I)])
    objective = np.concatenate((
        -instance.profits.ravel(),
        -pair_objective.ravel() if P else np.zeros(0),
        np.zeros(I * J),
    ))
    labels = (
        _customer_action_labels(VariableKind.SINGLE_ACTION, I, J)
        + [ColumnLabel(VariableKind.ACTION_PAIR, i, j1, j2) for i in range(I) for j1, j2 in pairs]
        + _customer_action_labels(VariableKind.AUXILIARY, I, J)
    )
    return builder.build(objective, tuple(labels))


def synergy_pair_profits(profits: np.ndarray, synergy: float) -> np.ndarray:
    """q_i^{j1,j2} = synergy · (p_i^{j1} + p_i^{j2})."""
    profits = np.asarray(profits, dtype=np.float64)
    return synergy * (profits[:, :, None] + profits[:, None, :])
