import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import fit_logistic_scipy
from sdsmec import (
    CellState,
    ConstraintMask,
    ConvergenceWarning,
    DimensionMismatchError,
    FitError,
    IncidenceMatrix,
    col_sums,
    estimate_q,
    fit_logistic,
    predict_q,
    row_sums,
)
from sdsmec.nullmodel import Model, score_residuals
from sdsmec.oracle import SpaceSpec, enumerate_space, iter_space
from sdsmec.synth import TOY_FIXTURE, random_bipartite, random_mask, two_block


def test_constant_predictors_give_response_mean():
    B = IncidenceMatrix([[1, 0], [0, 1]])
    fit = fit_logistic(B)
    assert fit.converged and not fit.degenerate
    np.testing.assert_allclose(estimate_q(B).values, 0.5, atol=1e-15)


def test_all_zero_free_cells_is_degenerate():
    B = IncidenceMatrix([[0, 0, 1], [0, 0, 0]])
    mask = ConstraintMask.from_cells(B.shape, required=[(0, 2)])
    fit = fit_logistic(B, mask)
    assert fit.degenerate
    Q = predict_q(fit, row_sums(B), col_sums(B), mask)
    assert Q.values.tolist() == [[0, 0, 1], [0, 0, 0]]


def test_all_one_free_cells_is_degenerate():
    B = IncidenceMatrix(np.ones((3, 3)))
    Q = estimate_q(B)
    assert Q.fit.degenerate
    assert (Q.values == 1.0).all()


def test_no_free_cells_raises():
    B = IncidenceMatrix([[0, 0]])
    with pytest.raises(FitError):
        fit_logistic(B, ConstraintMask([[1, 1]]))


def test_matches_generic_optimizer():
    B = random_bipartite(12, 15, 0.4, seed=21)
    mask = random_mask(B, 0.3, 0.1, seed=22)
    fit = fit_logistic(B, mask)
    rows, cols = np.nonzero(mask.free_cells)
    R, C = row_sums(B).values, col_sums(B).values
    X = np.column_stack([np.ones(rows.size), R[rows], C[cols]]).astype(float)
    ref = fit_logistic_scipy(X, B.cells[rows, cols].astype(float))
    np.testing.assert_allclose(fit.coef, ref, rtol=1e-5, atol=1e-6)


def test_prohibited_column_is_zero():
    cells = random_bipartite(8, 6, 0.5, seed=9).cells.copy()
    cells[:, 1] = 0
    B = IncidenceMatrix(cells)
    states = np.zeros(B.shape, dtype=np.int8)
    states[:, 1] = CellState.PROHIBITED
    Q = estimate_q(B, ConstraintMask(states))
    assert Q.fit.converged
    assert (Q.values[:, 1] == 0).all()


def test_all_free_mask_equals_unconstrained():
    B = random_bipartite(8, 9, 0.5, seed=4)
    np.testing.assert_array_equal(
        estimate_q(B, ConstraintMask.free(B.shape)).values, estimate_q(B).values
    )


def test_required_cell_is_one_regardless_of_coefficients():
    from sdsmec.nullmodel import FitResult

    fit = FitResult(-50.0, 0.0, 0.0, True, 1, False)
    mask = ConstraintMask.from_cells((2, 2), required=[(1, 0)])
    Q = predict_q(fit, [1, 1], [1, 1], mask)
    assert Q.values[1, 0] == 1.0
    assert Q.values[0, 0] < 1e-11


def test_predict_dimension_mismatch():
    fit = fit_logistic(IncidenceMatrix([[1, 0], [0, 1]]))
    with pytest.raises(DimensionMismatchError):
        predict_q(fit, [1, 1], [1, 1], ConstraintMask.free((3, 2)))


def test_toy_cross_group_cells_are_zero():
    B, mask = two_block(TOY_FIXTURE)
    Q = estimate_q(B, mask)
    assert (Q.values[mask.prohibited] == 0).all()
    assert (Q.values[mask.free_cells] > 0).all()


def test_one_prohibited_cell_estimate_is_close_to_truth():
    margins = (1, 1, 2, 2)
    mask = ConstraintMask.from_cells((4, 4), prohibited=[(0, 0)])
    spec = SpaceSpec(margins, margins, mask)
    truth = enumerate_space(spec).true_q
    for member in iter_space(spec):
        Q = estimate_q(IncidenceMatrix(member), mask)
        assert np.abs(Q.values - truth)[mask.free_cells].max() < 0.05


def test_estimate_is_member_independent():
    # free-cell sufficient statistics are fixed by margins and mask
    margins = (1, 1, 2, 2)
    for cell in itertools.product(range(4), range(4)):
        mask = ConstraintMask.from_cells((4, 4), prohibited=[cell])
        estimates = [estimate_q(IncidenceMatrix(m), mask).values for m in iter_space(SpaceSpec(margins, margins, mask))]
        for est in estimates[1:]:
            np.testing.assert_allclose(est, estimates[0], atol=1e-12)


instances = st.tuples(
    st.integers(2, 12), st.integers(2, 12), st.floats(0.15, 0.85), st.integers(0, 2**31 - 1), st.booleans()
)


@given(instances)
@settings(max_examples=60, deadline=None)
def test_score_equations_and_ranges(args):
    r, c, density, seed, constrained = args
    B = random_bipartite(r, c, density, seed)
    mask = random_mask(B, 0.25, 0.1, seed + 1) if constrained else ConstraintMask.free(B.shape)
    if not mask.free_cells.any():
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        Q = estimate_q(B, mask)
    v = Q.values
    assert not np.isnan(v).any()
    assert ((v >= 0) & (v <= 1)).all()
    assert (v[mask.prohibited] == 0).all()
    assert (v[mask.required] == 1).all()
    if Q.fit.converged:
        assert np.abs(score_residuals(B, Q, mask)).max() < 1e-6


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_row_permutation_equivariance(seed):
    B = random_bipartite(7, 9, 0.45, seed)
    mask = random_mask(B, 0.2, 0.1, seed + 7)
    order = np.random.default_rng(seed).permutation(B.n_agents)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        Q = estimate_q(B, mask).values
        Qp = estimate_q(B.permute(order), mask.permute(order)).values
    np.testing.assert_allclose(Qp, Q[order], atol=1e-9)


def test_separation_reports_nonconvergence():
    # rows with r_i = 3 are full, the rest empty: r_i separates perfectly
    B = IncidenceMatrix([[1, 1, 1], [0, 0, 0], [1, 1, 1], [0, 0, 0]])
    with pytest.warns(ConvergenceWarning):
        Q = estimate_q(B)
    assert not Q.fit.converged
    assert not np.isnan(Q.values).any()
    assert Q.values.min() >= 1e-12 and Q.values.max() <= 1 - 1e-12


def test_provenance_recorded():
    B = random_bipartite(4, 4, 0.5, seed=1)
    assert estimate_q(B, provenance="sdsm").provenance is Model.SDSM
