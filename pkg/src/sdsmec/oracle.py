"""Exact microcanonical ground truth for small spaces.

Enumerates every binary matrix with prescribed row/column sums and per-cell
constraints, giving the space's cardinality and the exact probability that
each cell holds a 1. Two independent routes are provided: row-wise
backtracking (``enumerate_space``) and a brute-force filter over all
``2**(r*c)`` matrices (``exhaustive_scan``); the tests use each to check the
other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import ConstraintMask, DegreeSequence, IncidenceMatrix
from .errors import DimensionMismatchError, InfeasibleSpaceError, SpaceTooLargeError
from .nullmodel import ProbabilityMatrix

__all__ = [
    "SpaceSpec",
    "SpaceSummary",
    "DeviationReport",
    "enumerate_space",
    "iter_space",
    "exhaustive_scan",
    "representative_member",
    "q_deviation",
    "pvalue_oracle",
    "MAX_DIM",
    "MAX_NODES",
]

MAX_DIM = 6
MAX_NODES = 10**8
EXHAUSTIVE_MAX_CELLS = 20


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    row_sums: DegreeSequence
    col_sums: DegreeSequence
    mask: ConstraintMask = None

    def __post_init__(self):
        R = self.row_sums
        C = self.col_sums
        if not isinstance(R, DegreeSequence):
            R = DegreeSequence(R, "row")
        if not isinstance(C, DegreeSequence):
            C = DegreeSequence(C, "column")
        object.__setattr__(self, "row_sums", R)
        object.__setattr__(self, "col_sums", C)
        if len(R) < 1 or len(C) < 1:
            raise InfeasibleSpaceError("a space needs at least one row and one column")
        mask = self.mask
        if mask is None:
            mask = ConstraintMask.free((len(R), len(C)))
        object.__setattr__(self, "mask", mask)
        if mask.shape != self.shape:
            raise DimensionMismatchError(f"mask shape {mask.shape} != margins shape {self.shape}")
        if R.total() != C.total():
            raise InfeasibleSpaceError(
                f"row sums total {R.total()} but column sums total {C.total()}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_sums), len(self.col_sums)

    @classmethod
    def from_matrix(cls, B: IncidenceMatrix, mask: ConstraintMask | None = None) -> "SpaceSpec":
        return cls(B.cells.sum(axis=1), B.cells.sum(axis=0), mask)

    def residual(self):
        """Margins left after committing required cells, plus the free-cell mask."""
        req = self.mask.required.astype(np.int64)
        R = self.row_sums.values - req.sum(axis=1)
        C = self.col_sums.values - req.sum(axis=0)
        return R, C, self.mask.free_cells

    def search_width(self) -> int:
        """Upper bound on backtracking leaves: product of per-row choice counts."""
        R, _, free = self.residual()
        width = 1
        for need, avail in zip(R, free.sum(axis=1)):
            if need < 0 or need > avail:
                return 0
            width *= math.comb(int(avail), int(need))
        return width


@dataclass(frozen=True, eq=False)
class SpaceSummary:
    cardinality: int
    counts: np.ndarray  # per-cell number of members with a 1 there (exact ints)
    spec: SpaceSpec = field(repr=False, default=None)

    @property
    def true_q(self) -> np.ndarray:
        if self.cardinality == 0:
            return np.zeros(self.counts.shape)
        return self.counts.astype(np.float64) / self.cardinality

    def true_q_exact(self) -> list[list[Fraction]]:
        return [[Fraction(int(v), self.cardinality) for v in row] for row in self.counts]


def _check_bounds(spec: SpaceSpec, max_dim: int, max_nodes: int) -> None:
    r, c = spec.shape
    if r > max_dim or c > max_dim:
        raise SpaceTooLargeError(f"space is {r}x{c}; enumeration is limited to {max_dim}x{max_dim}")
    width = spec.search_width()
    if width > max_nodes:
        raise SpaceTooLargeError(
            f"estimated search width {width:.3g} exceeds the limit of {max_nodes:.3g} nodes"
        )


def _backtrack(spec: SpaceSpec, visit=None):
    """Row-wise backtracking over residual (free-cell) choices.

    Returns (count, counts_matrix). When ``visit`` is given it is called with
    each complete residual 0/1 matrix.
    """
    r, c = spec.shape
    R, C, free = spec.residual()
    counts = np.zeros((r, c), dtype=object)
    if (R < 0).any() or (C < 0).any():
        return 0, counts

    choices = [np.flatnonzero(free[i]) for i in range(r)]
    # how many rows at or below i may still place a 1 in column k
    reach = np.zeros((r + 1, c), dtype=np.int64)
    for i in range(r - 1, -1, -1):
        reach[i] = reach[i + 1] + free[i]

    cap = [int(x) for x in C]
    current = np.zeros((r, c), dtype=np.uint8)

    def feasible_after(i):
        # every column's remaining need must be reachable by rows below
        for k in range(c):
            if cap[k] > reach[i + 1][k]:
                return False
        return True

    def rec(i) -> int:
        if i == r:
            if any(cap):
                return 0
            if visit is not None:
                visit(current)
            return 1
        need = int(R[i])
        total = 0
        options = [k for k in choices[i] if cap[k] > 0]
        if len(options) < need:
            return 0
        for combo in itertools.combinations(options, need):
            for k in combo:
                cap[k] -= 1
            if feasible_after(i):
                if visit is not None:
                    current[i, list(combo)] = 1
                n = rec(i + 1)
                if visit is not None:
                    current[i, list(combo)] = 0
                if n:
                    total += n
                    for k in combo:
                        counts[i, k] += n
            for k in combo:
                cap[k] += 1
        return total

    return rec(0), counts


def enumerate_space(
    spec: SpaceSpec, max_dim: int = MAX_DIM, max_nodes: int = MAX_NODES
) -> SpaceSummary:
    """Exact cardinality and inclusion probabilities of a constrained space.

    Required cells are committed up front and the residual prohibited-only
    problem is enumerated. An empty space is a valid result (cardinality 0).
    """
    _check_bounds(spec, max_dim, max_nodes)
    total, counts = _backtrack(spec)
    req = spec.mask.required
    if total:
        counts = counts + req.astype(object) * total
    return SpaceSummary(int(total), np.array(counts, dtype=np.int64), spec)


def iter_space(
    spec: SpaceSpec, max_dim: int = MAX_DIM, max_nodes: int = MAX_NODES
) -> Iterator[np.ndarray]:
    """Yield every member of the space as a fresh ``uint8`` array."""
    _check_bounds(spec, max_dim, max_nodes)
    members = []
    req = spec.mask.required.astype(np.uint8)
    _backtrack(spec, visit=lambda m: members.append(m | req))
    yield from members


def exhaustive_scan(spec: SpaceSpec) -> SpaceSummary:
    """Brute-force filter of all 2**(r*c) binary matrices; desk scale only."""
    r, c = spec.shape
    n = r * c
    if n > EXHAUSTIVE_MAX_CELLS:
        raise SpaceTooLargeError(f"exhaustive scan limited to {EXHAUSTIVE_MAX_CELLS} cells, got {n}")
    codes = np.arange(1 << n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8).reshape(-1, r, c)
    keep = (bits.sum(axis=2) == spec.row_sums.values).all(axis=1)
    keep &= (bits.sum(axis=1) == spec.col_sums.values).all(axis=1)
    keep &= ~(bits & spec.mask.prohibited).any(axis=(1, 2))
    keep &= (bits[:, spec.mask.required] == 1).all(axis=1)
    members = bits[keep]
    return SpaceSummary(int(len(members)), members.sum(axis=0, dtype=np.int64), spec)


def representative_member(spec: SpaceSpec, **bounds) -> IncidenceMatrix:
    """First member found by backtracking; raises if the space is empty."""
    for m in iter_space(spec, **bounds):
        return IncidenceMatrix(m)
    raise InfeasibleSpaceError("space has no members")


@dataclass(frozen=True)
class DeviationReport:
    cells: tuple  # (row, col) of each free cell, row-major
    deviations: np.ndarray
    mean: float
    max: float
    hist_counts: np.ndarray
    hist_edges: np.ndarray


def q_deviation(
    estimated: ProbabilityMatrix,
    truth: SpaceSummary,
    mask: ConstraintMask | None = None,
    bins=20,
) -> DeviationReport:
    """Absolute deviation ``|Q_est - Q_true|`` over free cells.

    Constrained cells are excluded since both sides are pinned there.
    Histogram bins default to 20 equal bins on [0, 1].
    """
    est = np.asarray(getattr(estimated, "values", estimated), dtype=np.float64)
    if truth.cardinality == 0:
        raise InfeasibleSpaceError("cannot compare against an empty space")
    if est.shape != truth.counts.shape:
        raise DimensionMismatchError(f"estimate is {est.shape} but truth is {truth.counts.shape}")
    if mask is None:
        mask = truth.spec.mask if truth.spec is not None else ConstraintMask.free(est.shape)
    free = mask.free_cells
    dev = np.abs(est - truth.true_q)[free]
    if isinstance(bins, int):
        bins = np.linspace(0.0, 1.0, bins + 1)
    hist, edges = np.histogram(dev, bins=bins)
    cells = tuple((int(i), int(k)) for i, k in np.argwhere(free))
    return DeviationReport(
        cells,
        dev,
        float(dev.mean()) if dev.size else 0.0,
        float(dev.max()) if dev.size else 0.0,
        hist,
        edges,
    )


def pvalue_oracle(B: IncidenceMatrix, spec: SpaceSpec, i: int, j: int, **bounds) -> Fraction:
    """Exact fraction of space members whose (i, j) co-occurrence is >= B's."""
    if B.shape != spec.shape:
        raise DimensionMismatchError(f"B is {B.shape} but the space is {spec.shape}")
    observed = int(B.cells[i].astype(np.int64) @ B.cells[j])
    hits = total = 0
    for m in iter_space(spec, **bounds):
        total += 1
        if int(m[i].astype(np.int64) @ m[j]) >= observed:
            hits += 1
    if total == 0:
        raise InfeasibleSpaceError("space has no members")
    return Fraction(hits, total)

