"""Seeded generators for toy and random bipartite networks.

All randomness comes from ``numpy.random.default_rng(seed)`` (the PCG64 bit
generator). Cells are drawn as uniform doubles in row-major order and a cell
is 1 iff its draw is below the density, so a given seed gives the same matrix
on every platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CellState, ConstraintMask, IncidenceMatrix

__all__ = ["TwoBlockSpec", "two_block", "random_bipartite", "random_mask", "TOY_FIXTURE"]


@dataclass(frozen=True)
class TwoBlockSpec:
    agents_per_group: int = 6
    artifacts_per_group: int = 10
    within_density: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.agents_per_group < 2 or self.artifacts_per_group < 2:
            raise ValueError("each group needs at least 2 agents and 2 artifacts")
        if not (0.0 < self.within_density <= 1.0):
            raise ValueError(f"within_density must be in (0, 1], got {self.within_density}")


def two_block(spec: TwoBlockSpec) -> tuple[IncidenceMatrix, ConstraintMask]:
    """Two groups of agents that only join their own group's artifacts.

    Agents ``g0_agent*`` / ``g1_agent*`` and artifacts ``g0_artifact*`` /
    ``g1_artifact*``. The mask prohibits every cross-group cell.
    """
    n, m = spec.agents_per_group, spec.artifacts_per_group
    agent_group = np.repeat([0, 1], n)
    artifact_group = np.repeat([0, 1], m)
    within = agent_group[:, None] == artifact_group[None, :]

    rng = np.random.default_rng(spec.seed)
    draws = rng.random((2 * n, 2 * m))
    cells = ((draws < spec.within_density) & within).astype(np.uint8)

    width = len(str(max(n, m) - 1))
    agents = [f"g{g}_agent{i:0{width}d}" for g in (0, 1) for i in range(n)]
    artifacts = [f"g{g}_artifact{k:0{width}d}" for g in (0, 1) for k in range(m)]
    states = np.where(within, CellState.FREE, CellState.PROHIBITED).astype(np.int8)
    return IncidenceMatrix(cells, agents, artifacts), ConstraintMask(states)


def random_bipartite(r: int, c: int, density: float, seed: int) -> IncidenceMatrix:
    """Each cell is 1 independently with probability ``density``."""
    if r < 1 or c < 1:
        raise ValueError("need r >= 1 and c >= 1")
    if not (0.0 <= density <= 1.0):
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    return IncidenceMatrix((rng.random((r, c)) < density).astype(np.uint8))


def random_mask(
    B: IncidenceMatrix, p_prohibit: float, p_require: float, seed: int
) -> ConstraintMask:
    """A mask consistent with B: prohibitions only on 0s, requirements only on 1s."""
    rng = np.random.default_rng(seed)
    u = rng.random(B.shape)
    states = np.zeros(B.shape, dtype=np.int8)
    states[(B.cells == 0) & (u < p_prohibit)] = CellState.PROHIBITED
    states[(B.cells == 1) & (u < p_require)] = CellState.REQUIRED
    return ConstraintMask(states)


TOY_FIXTURE = TwoBlockSpec(agents_per_group=6, artifacts_per_group=10, within_density=0.8, seed=0)
