"""Bipartite data model: incidence matrices, constraint masks, margins, projection."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "CellState",
    "IncidenceMatrix",
    "DegreeSequence",
    "ConstraintMask",
    "Projection",
    "ValidationReport",
    "row_sums",
    "col_sums",
    "project",
    "validate",
]


class CellState(enum.IntEnum):
    FREE = 0
    PROHIBITED = 1
    REQUIRED = 2

    @classmethod
    def parse(cls, value) -> "CellState":
        if isinstance(value, CellState):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip().upper()]
            except KeyError:
                raise ValueError(f"unknown constraint state {value!r}") from None
        return cls(int(value))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _labels(labels, n: int, prefix: str) -> tuple:
    if labels is None:
        return tuple(f"{prefix}{i}" for i in range(n))
    labels = tuple(labels)
    if len(labels) != n:
        raise DimensionMismatchError(
            f"expected {n} {prefix} labels, got {len(labels)}"
        )
    if len(set(labels)) != n:
        seen = set()
        dupes = sorted({str(x) for x in labels if x in seen or seen.add(x)})
        raise ValueError(f"duplicate {prefix} labels: {', '.join(dupes)}")
    return labels


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """Binary agent x artifact matrix with labelled rows and columns.

    ``cells`` is stored densely as a read-only ``uint8`` array. Labels default
    to ``agent0..`` / ``artifact0..`` when omitted.
    """

    cells: np.ndarray
    agent_labels: tuple = None
    artifact_labels: tuple = None

    def __post_init__(self):
        cells = np.asarray(self.cells)
        if cells.ndim != 2:
            raise ValueError(f"incidence matrix must be 2-D, got shape {cells.shape}")
        r, c = cells.shape
        if r < 1 or c < 1:
            raise ValueError("incidence matrix needs at least one agent and one artifact")
        if not np.isin(cells, (0, 1)).all():
            raise ValueError("incidence matrix cells must be 0 or 1")
        object.__setattr__(self, "cells", _frozen(cells.astype(np.uint8)))
        object.__setattr__(self, "agent_labels", _labels(self.agent_labels, r, "agent"))
        object.__setattr__(
            self, "artifact_labels", _labels(self.artifact_labels, c, "artifact")
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @property
    def n_agents(self) -> int:
        return self.cells.shape[0]

    @property
    def n_artifacts(self) -> int:
        return self.cells.shape[1]

    def transpose(self) -> "IncidenceMatrix":
        return IncidenceMatrix(self.cells.T, self.artifact_labels, self.agent_labels)

    def permute(self, agent_order=None, artifact_order=None) -> "IncidenceMatrix":
        """Reorder rows and/or columns by index arrays; labels travel with them."""
        rows = np.arange(self.n_agents) if agent_order is None else np.asarray(agent_order)
        cols = (
            np.arange(self.n_artifacts)
            if artifact_order is None
            else np.asarray(artifact_order)
        )
        return IncidenceMatrix(
            self.cells[np.ix_(rows, cols)],
            [self.agent_labels[i] for i in rows],
            [self.artifact_labels[k] for k in cols],
        )

    def reorder(self, agent_labels=None, artifact_labels=None) -> "IncidenceMatrix":
        """Same relation with rows/columns arranged in the given label order."""
        agents = {a: i for i, a in enumerate(self.agent_labels)}
        artifacts = {k: i for i, k in enumerate(self.artifact_labels)}
        rows = None if agent_labels is None else [agents[a] for a in agent_labels]
        cols = None if artifact_labels is None else [artifacts[k] for k in artifact_labels]
        if rows is not None and len(rows) != self.n_agents:
            raise DimensionMismatchError("agent label order must list every agent once")
        if cols is not None and len(cols) != self.n_artifacts:
            raise DimensionMismatchError("artifact label order must list every artifact once")
        return self.permute(rows, cols)

    def __eq__(self, other):
        if not isinstance(other, IncidenceMatrix):
            return NotImplemented
        return (
            self.agent_labels == other.agent_labels
            and self.artifact_labels == other.artifact_labels
            and np.array_equal(self.cells, other.cells)
        )

    __hash__ = None

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[Hashable, Hashable]],
        agent_labels: Sequence | None = None,
        artifact_labels: Sequence | None = None,
    ) -> tuple["IncidenceMatrix", int]:
        """Build B from (agent, artifact) pairs.

        Indices follow first appearance unless explicit label orders are given.
        Returns the matrix and the number of duplicate pairs that were collapsed.
        """
        agents: dict = {} if agent_labels is None else {a: i for i, a in enumerate(agent_labels)}
        artifacts: dict = (
            {} if artifact_labels is None else {a: i for i, a in enumerate(artifact_labels)}
        )
        pairs = []
        for a, k in edges:
            if a not in agents:
                if agent_labels is not None:
                    raise KeyError(f"unknown agent label {a!r}")
                agents[a] = len(agents)
            if k not in artifacts:
                if artifact_labels is not None:
                    raise KeyError(f"unknown artifact label {k!r}")
                artifacts[k] = len(artifacts)
            pairs.append((agents[a], artifacts[k]))
        cells = np.zeros((len(agents), len(artifacts)), dtype=np.uint8)
        duplicates = 0
        for i, k in pairs:
            if cells[i, k]:
                duplicates += 1
            cells[i, k] = 1
        return cls(cells, list(agents), list(artifacts)), duplicates

    def edges(self) -> list[tuple]:
        rows, cols = np.nonzero(self.cells)
        return [(self.agent_labels[i], self.artifact_labels[k]) for i, k in zip(rows, cols)]


@dataclass(frozen=True)
class DegreeSequence:
    values: np.ndarray
    axis: str  # "row" or "column"

    def __post_init__(self):
        if self.axis not in ("row", "column"):
            raise ValueError(f"axis must be 'row' or 'column', got {self.axis!r}")
        values = np.asarray(self.values, dtype=np.int64)
        if values.ndim != 1 or (values < 0).any():
            raise ValueError("degree sequence must be a 1-D array of non-negative integers")
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(int(v) for v in self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __eq__(self, other):
        if isinstance(other, DegreeSequence):
            return self.axis == other.axis and np.array_equal(self.values, other.values)
        if isinstance(other, (tuple, list)):
            return tuple(self) == tuple(other)
        return NotImplemented

    def total(self) -> int:
        return int(self.values.sum())


@dataclass(frozen=True, eq=False)
class ConstraintMask:
    """Per-cell state (free / prohibited / required); free by default."""

    states: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states)
        if states.dtype.kind in "US":
            states = np.vectorize(lambda s: int(CellState.parse(s)), otypes=[np.int8])(states)
        states = np.asarray(states, dtype=np.int8)
        if states.ndim != 2:
            raise ValueError("constraint mask must be 2-D")
        if not np.isin(states, list(CellState)).all():
            raise ValueError("constraint mask entries must be 0 (free), 1 (prohibited) or 2 (required)")
        object.__setattr__(self, "states", _frozen(states))

    @classmethod
    def free(cls, shape) -> "ConstraintMask":
        if isinstance(shape, IncidenceMatrix):
            shape = shape.shape
        return cls(np.zeros(shape, dtype=np.int8))

    @classmethod
    def from_cells(cls, shape, prohibited=(), required=()) -> "ConstraintMask":
        states = np.zeros(shape, dtype=np.int8)
        for i, k in prohibited:
            states[i, k] = CellState.PROHIBITED
        for i, k in required:
            if states[i, k] == CellState.PROHIBITED:
                raise ValueError(f"cell ({i}, {k}) cannot be both prohibited and required")
            states[i, k] = CellState.REQUIRED
        return cls(states)

    @property
    def shape(self):
        return self.states.shape

    @property
    def prohibited(self) -> np.ndarray:
        return self.states == CellState.PROHIBITED

    @property
    def required(self) -> np.ndarray:
        return self.states == CellState.REQUIRED

    @property
    def free_cells(self) -> np.ndarray:
        return self.states == CellState.FREE

    def is_all_free(self) -> bool:
        return not self.states.any()

    def with_state(self, i: int, k: int, state) -> "ConstraintMask":
        states = self.states.copy()
        states[i, k] = CellState.parse(state)
        return ConstraintMask(states)

    def permute(self, agent_order=None, artifact_order=None) -> "ConstraintMask":
        r, c = self.shape
        rows = np.arange(r) if agent_order is None else np.asarray(agent_order)
        cols = np.arange(c) if artifact_order is None else np.asarray(artifact_order)
        return ConstraintMask(self.states[np.ix_(rows, cols)])

    def __eq__(self, other):
        if not isinstance(other, ConstraintMask):
            return NotImplemented
        return np.array_equal(self.states, other.states)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Projection:
    agent_labels: tuple
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "agent_labels", tuple(self.agent_labels))
        object.__setattr__(self, "weights", _frozen(np.asarray(self.weights, dtype=np.int64)))

    def edges(self) -> list[tuple]:
        """Positive-weight agent pairs as ``(label_i, label_j, weight)`` with i < j."""
        i, j = np.nonzero(np.triu(self.weights, k=1))
        return [(self.agent_labels[a], self.agent_labels[b], int(self.weights[a, b])) for a, b in zip(i, j)]


def row_sums(B: IncidenceMatrix) -> DegreeSequence:
    return DegreeSequence(B.cells.sum(axis=1, dtype=np.int64), "row")


def col_sums(B: IncidenceMatrix) -> DegreeSequence:
    return DegreeSequence(B.cells.sum(axis=0, dtype=np.int64), "column")


def project(B: IncidenceMatrix) -> Projection:
    """Agent co-occurrence counts ``P = B @ B.T``."""
    cells = B.cells.astype(np.int64)
    return Projection(B.agent_labels, cells @ cells.T)


@dataclass(frozen=True)
class ValidationReport:
    prohibited_violations: tuple = ()
    required_violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not (self.prohibited_violations or self.required_violations)

    def __bool__(self):
        return self.ok

    @property
    def violations(self) -> tuple:
        return self.prohibited_violations + self.required_violations

    def __str__(self):
        if self.ok:
            return "no constraint violations"
        parts = []
        if self.prohibited_violations:
            cells = ", ".join(map(str, self.prohibited_violations[:10]))
            parts.append(f"{len(self.prohibited_violations)} prohibited cell(s) contain 1: {cells}")
        if self.required_violations:
            cells = ", ".join(map(str, self.required_violations[:10]))
            parts.append(f"{len(self.required_violations)} required cell(s) contain 0: {cells}")
        return "; ".join(parts)


def validate(B: IncidenceMatrix, mask: ConstraintMask) -> ValidationReport:
    """Check B against its mask.

    Raises DimensionMismatchError when shapes differ; otherwise returns a
    report listing every violating cell as an (row, column) index pair.
    """
    if B.shape != mask.shape:
        raise DimensionMismatchError(
            f"incidence matrix is {B.shape} but constraint mask is {mask.shape}"
        )
    bad_zero = np.argwhere(mask.prohibited & (B.cells == 1))
    bad_one = np.argwhere(mask.required & (B.cells == 0))
    return ValidationReport(
        tuple((int(i), int(k)) for i, k in bad_zero),
        tuple((int(i), int(k)) for i, k in bad_one),
    )
