"""Backbone extraction: test every projected edge against its null distribution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConstraintMask, IncidenceMatrix, project, validate
from .errors import ConstraintViolationError, DimensionMismatchError
from .nullmodel import Model, ProbabilityMatrix, estimate_q
from .pbin import upper_tail_batch

__all__ = ["Backbone", "significance_matrix", "extract_backbone"]


@dataclass(frozen=True, eq=False)
class Backbone:
    agent_labels: tuple
    adjacency: np.ndarray
    pvalues: np.ndarray
    alpha: float
    model: Model
    q: ProbabilityMatrix | None = None

    def edges(self) -> list[tuple]:
        """Backbone edges as label pairs, smaller label first, sorted."""
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        out = []
        for a, b in zip(i, j):
            la, lb = self.agent_labels[a], self.agent_labels[b]
            out.append((la, lb) if str(la) <= str(lb) else (lb, la))
        return sorted(out, key=lambda e: (str(e[0]), str(e[1])))

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, k=1).sum())

    @property
    def n_tested(self) -> int:
        r = len(self.agent_labels)
        return r * (r - 1) // 2


def significance_matrix(B: IncidenceMatrix, Q: ProbabilityMatrix) -> np.ndarray:
    """Upper-tail p-values ``Pr(P*_ij >= P_ij)`` for every agent pair.

    The result is symmetric with a NaN diagonal. Pairs are evaluated one
    anchor row at a time in index order, so output is deterministic.
    """
    q = np.asarray(getattr(Q, "values", Q), dtype=np.float64)
    if q.shape != B.shape:
        raise DimensionMismatchError(f"Q is {q.shape} but B is {B.shape}")
    weights = project(B).weights
    r = B.n_agents
    pv = np.full((r, r), np.nan)
    for i in range(r - 1):
        js = np.arange(i + 1, r)
        tails = upper_tail_batch(q[i][None, :] * q[js], weights[i, js])
        pv[i, js] = tails
        pv[js, i] = tails
    return pv


def extract_backbone(
    B: IncidenceMatrix,
    mask: ConstraintMask | None = None,
    alpha: float = 0.05,
    model: Model | str = Model.SDSM_EC,
) -> Backbone:
    """Keep edge (i, j) iff its p-value is strictly below ``alpha / 2``.

    With ``model="sdsm"`` the mask is checked against B but otherwise ignored.
    """
    model = Model(model)
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if mask is None:
        mask = ConstraintMask.free(B.shape)
    report = validate(B, mask)
    if not report.ok:
        raise ConstraintViolationError(report)

    fit_mask = mask if model is Model.SDSM_EC else ConstraintMask.free(B.shape)
    Q = estimate_q(B, fit_mask, provenance=model)
    pv = significance_matrix(B, Q)
    adjacency = np.zeros(pv.shape, dtype=np.uint8)
    off = ~np.eye(B.n_agents, dtype=bool)
    adjacency[off] = pv[off] < alpha / 2
    return Backbone(B.agent_labels, adjacency, pv, float(alpha), model, Q)
