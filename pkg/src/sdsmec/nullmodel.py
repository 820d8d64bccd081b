"""Canonical-ensemble probabilities Q via logistic regression on the margins.

Each cell's success probability is modelled as
``logistic(beta0 + beta1 * r_i + beta2 * c_k)`` where ``r_i`` and ``c_k`` are
the observed row and column sums of B. The coefficients are the maximum
likelihood estimates over free cells only; prohibited cells are then pinned to
0 and required cells to 1.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import (
    ConstraintMask,
    DegreeSequence,
    IncidenceMatrix,
    col_sums,
    row_sums,
)
from .errors import ConvergenceWarning, DimensionMismatchError, FitError

__all__ = [
    "Model",
    "FitResult",
    "ProbabilityMatrix",
    "fit_logistic",
    "predict_q",
    "estimate_q",
    "score_residuals",
]

MAX_ITER = 100
STEP_TOL = 1e-10
SCORE_TOL = 1e-12
PROB_FLOOR = 1e-12
_ETA_LIMIT = float(np.log((1 - PROB_FLOOR) / PROB_FLOOR))


class Model(str, enum.Enum):
    SDSM = "sdsm"
    SDSM_EC = "sdsm-ec"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FitResult:
    beta0: float
    beta1: float
    beta2: float
    converged: bool
    iterations: int
    degenerate: bool
    n_free: int = 0
    loglik: float = float("nan")

    @property
    def coef(self) -> np.ndarray:
        return np.array([self.beta0, self.beta1, self.beta2])


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    values: np.ndarray
    provenance: Model = Model.SDSM_EC
    fit: FitResult | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise ValueError("probability matrix must be 2-D")
        if np.isnan(values).any() or (values < 0).any() or (values > 1).any():
            raise ValueError("probabilities must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "provenance", Model(self.provenance))

    @property
    def shape(self):
        return self.values.shape


def _design(R: np.ndarray, C: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    X = np.empty((rows.size, 3))
    X[:, 0] = 1.0
    X[:, 1] = R[rows]
    X[:, 2] = C[cols]
    return X


def _loglik(X, y, beta):
    eta = X @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def _irls(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, bool, int]:
    """Damped Newton/IRLS for the 3-coefficient logistic likelihood."""
    mean = y.mean()
    beta = np.array([np.log(mean / (1 - mean)), 0.0, 0.0])
    ll = _loglik(X, y, beta)
    for it in range(1, MAX_ITER + 1):
        p = expit(X @ beta)
        score = X.T @ (y - p)
        if np.max(np.abs(score)) < SCORE_TOL:
            return beta, True, it - 1
        w = p * (1 - p)
        H = X.T @ (X * w[:, None])
        # lstsq copes with collinear predictors (e.g. all r_i equal)
        step = np.linalg.lstsq(H, score, rcond=None)[0]
        t = 1.0
        while True:
            cand = beta + t * step
            cand_ll = _loglik(X, y, cand)
            if cand_ll >= ll - 1e-12 * abs(ll) or t < 1e-10:
                break
            t *= 0.5
        delta = cand - beta
        beta, ll = cand, cand_ll
        if np.max(np.abs(delta)) < STEP_TOL:
            return beta, True, it
    return beta, False, MAX_ITER


def fit_logistic(B: IncidenceMatrix, mask: ConstraintMask | None = None) -> FitResult:
    """Maximum-likelihood fit of ``B_ik ~ 1 + r_i + c_k`` over free cells.

    Prohibited and required cells are left out of the fit; their B values are
    fixed by the constraint and say nothing about free-cell propensities. The
    covariates are the margins of the full matrix, constrained cells included.

    If every free response is identical the fit is flagged ``degenerate`` and
    the intercept is set to +/-inf so predictions are exactly 0 or 1.
    """
    if mask is None:
        mask = ConstraintMask.free(B.shape)
    if mask.shape != B.shape:
        raise DimensionMismatchError(f"mask shape {mask.shape} != matrix shape {B.shape}")
    rows, cols = np.nonzero(mask.free_cells)
    if rows.size == 0:
        raise FitError("no free cells to fit the logistic regression on")
    R = row_sums(B).values.astype(np.float64)
    C = col_sums(B).values.astype(np.float64)
    y = B.cells[rows, cols].astype(np.float64)

    if y.min() == y.max():
        beta0 = np.inf if y[0] == 1 else -np.inf
        return FitResult(beta0, 0.0, 0.0, True, 0, True, int(rows.size), 0.0)

    X = _design(R, C, rows, cols)
    beta, converged, iterations = _irls(X, y)
    # Under (quasi-)separation the score vanishes numerically as probabilities
    # saturate; that is a supremum, not an MLE.
    separated = np.abs(X @ beta).max() > _ETA_LIMIT
    if not converged or separated:
        converged = False
        reason = "separation in the data" if separated else f"no convergence in {MAX_ITER} iterations"
        warnings.warn(
            f"logistic regression did not converge ({reason}); fitted probabilities are clamped "
            f"to [{PROB_FLOOR:g}, 1 - {PROB_FLOOR:g}]",
            ConvergenceWarning,
            stacklevel=2,
        )
    return FitResult(
        float(beta[0]),
        float(beta[1]),
        float(beta[2]),
        converged,
        iterations,
        False,
        int(rows.size),
        _loglik(X, y, beta),
    )


def predict_q(
    fit: FitResult,
    R: DegreeSequence,
    C: DegreeSequence,
    mask: ConstraintMask | None = None,
    provenance: Model = Model.SDSM_EC,
) -> ProbabilityMatrix:
    R = np.asarray(R, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    shape = (R.size, C.size)
    if mask is None:
        mask = ConstraintMask.free(shape)
    if mask.shape != shape:
        raise DimensionMismatchError(f"mask shape {mask.shape} != margins shape {shape}")

    if fit.degenerate:
        q = np.full(shape, 1.0 if fit.beta0 > 0 else 0.0)
    else:
        eta = fit.beta0 + fit.beta1 * R[:, None] + fit.beta2 * C[None, :]
        q = np.clip(expit(eta), PROB_FLOOR, 1 - PROB_FLOOR)
    q[mask.prohibited] = 0.0
    q[mask.required] = 1.0
    return ProbabilityMatrix(q, provenance, fit)


def estimate_q(
    B: IncidenceMatrix,
    mask: ConstraintMask | None = None,
    provenance: Model = Model.SDSM_EC,
) -> ProbabilityMatrix:
    """Fit and predict in one go: Q for an all-free mask, Q' otherwise."""
    fit = fit_logistic(B, mask)
    return predict_q(fit, row_sums(B), col_sums(B), mask, provenance)


def score_residuals(
    B: IncidenceMatrix, Q: ProbabilityMatrix, mask: ConstraintMask | None = None
) -> np.ndarray:
    """Return the three score-equation residuals over free cells.

    At the MLE, ``sum(Q - B)``, ``sum(r_i (Q - B))`` and ``sum(c_k (Q - B))``
    over free cells are all zero.
    """
    if mask is None:
        mask = ConstraintMask.free(B.shape)
    free = mask.free_cells
    diff = np.where(free, Q.values - B.cells, 0.0)
    R = row_sums(B).values.astype(np.float64)
    C = col_sums(B).values.astype(np.float64)
    return np.array([diff.sum(), (R[:, None] * diff).sum(), (C[None, :] * diff).sum()])
