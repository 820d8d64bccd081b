"""Exact Poisson-binomial upper tails.

For a sum ``X`` of independent Bernoulli(p_k) variables, ``Pr(X >= t)`` is
computed by convolving one trial at a time over the states ``0..t`` where
state ``t`` is absorbing. The tail is therefore accumulated directly rather
than as ``1 - cdf``, which keeps small p-values accurate, and the cost is
O(c * t).

The batched kernel is the only implementation; the scalar ``upper_tail`` is a
one-row call into it so that single-pair and whole-matrix results agree bit
for bit.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError

__all__ = ["BernoulliParams", "pair_params", "upper_tail", "upper_tail_batch", "pmf"]


class BernoulliParams(np.ndarray):
    """1-D float array of success probabilities, validated to lie in [0, 1]."""

    def __new__(cls, probs: Sequence[float]):
        arr = np.asarray(probs, dtype=np.float64).reshape(-1)
        if np.isnan(arr).any() or (arr < 0).any() or (arr > 1).any():
            raise ValueError("Bernoulli probabilities must lie in [0, 1]")
        return arr.view(cls)


def pair_params(Q, i: int, j: int) -> BernoulliParams:
    """Per-artifact co-occurrence probabilities ``Q[i, k] * Q[j, k]`` for i != j."""
    values = getattr(Q, "values", Q)
    values = np.asarray(values, dtype=np.float64)
    if i == j:
        raise ValueError("self-pairs are not tested")
    n = values.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"agent index out of range for {n} agents: ({i}, {j})")
    return BernoulliParams(values[i] * values[j])


def upper_tail_batch(probs: np.ndarray, thresholds) -> np.ndarray:
    """Row-wise ``Pr(X_m >= t_m)`` for a 2-D array of Bernoulli probabilities.

    Trials with p == 1 are removed by lowering the row's threshold, and
    columns that are zero for every row are skipped; both shortcuts are exact.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2:
        raise ValueError("probs must be 2-D (pairs x trials)")
    m, n = probs.shape
    t = np.asarray(thresholds, dtype=np.int64).reshape(-1)
    if t.size != m:
        raise DimensionMismatchError(f"{m} probability rows but {t.size} thresholds")
    if (t < 0).any():
        raise ValueError("thresholds must be non-negative")

    certain = probs >= 1.0
    t = t - certain.sum(axis=1)
    p = np.where(certain, 0.0, probs)

    out = np.zeros(m)
    out[t <= 0] = 1.0
    n_uncertain = (p > 0).sum(axis=1)
    live = (t > 0) & (t <= n_uncertain)
    if not live.any():
        return out

    p = p[live]
    tl = t[live]
    width = int(tl.max()) + 1
    states = np.arange(width)[None, :]
    absorbing = states == tl[:, None]
    beyond = states > tl[:, None]

    dist = np.zeros((p.shape[0], width))
    dist[:, 0] = 1.0
    shifted = np.empty_like(dist)
    for k in np.flatnonzero(p.any(axis=0)):
        pk = p[:, k][:, None]
        shifted[:, 0] = 0.0
        shifted[:, 1:] = dist[:, :-1]
        moved = shifted * pk
        dist = np.where(absorbing, dist + moved, dist * (1.0 - pk) + moved)
        dist[beyond] = 0.0
    out[live] = np.clip(dist[np.arange(p.shape[0]), tl], 0.0, 1.0)
    return out


def upper_tail(params: Sequence[float], t: int) -> float:
    """``Pr(X >= t)`` for ``X`` the sum of independent Bernoulli(params)."""
    if t < 0:
        raise ValueError("threshold must be non-negative")
    probs = BernoulliParams(params)
    return float(upper_tail_batch(probs[None, :], [t])[0])


def pmf(params: Sequence[float]) -> np.ndarray:
    """Full probability mass function of the Poisson-binomial, length ``n + 1``."""
    dist = np.array([1.0])
    for p in BernoulliParams(params):
        nxt = np.zeros(dist.size + 1)
        nxt[:-1] = dist * (1 - p)
        nxt[1:] += dist * p
        dist = nxt
    return dist
