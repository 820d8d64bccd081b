"""Backbone extraction for bipartite projections with edge-constrained null models."""

from .core import (
    CellState,
    ConstraintMask,
    DegreeSequence,
    IncidenceMatrix,
    Projection,
    ValidationReport,
    col_sums,
    project,
    row_sums,
    validate,
)
from .errors import (
    ConstraintViolationError,
    ConvergenceWarning,
    DimensionMismatchError,
    FitError,
    FormatError,
    InfeasibleSpaceError,
    SDSMError,
    SpaceTooLargeError,
)
from .extract import Backbone, extract_backbone, significance_matrix
from .nullmodel import FitResult, Model, ProbabilityMatrix, estimate_q, fit_logistic, predict_q
from .oracle import SpaceSpec, SpaceSummary, enumerate_space, pvalue_oracle, q_deviation
from .pbin import BernoulliParams, pair_params, upper_tail
from .synth import TOY_FIXTURE, TwoBlockSpec, random_bipartite, two_block

__version__ = "0.1.0"
