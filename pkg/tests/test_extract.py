import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdsmec import (
    ConstraintMask,
    ConstraintViolationError,
    ConvergenceWarning,
    IncidenceMatrix,
    TOY_FIXTURE,
    estimate_q,
    extract_backbone,
    project,
    significance_matrix,
    two_block,
)
from sdsmec.nullmodel import Model, ProbabilityMatrix
from sdsmec.synth import random_bipartite, random_mask


def brute_pvalue(q_i, q_j, observed):
    """Enumerate every joint outcome of the c co-occurrence indicators."""
    total = 0.0
    params = [a * b for a, b in zip(q_i, q_j)]
    for outcome in itertools.product((0, 1), repeat=len(params)):
        if sum(outcome) >= observed:
            w = 1.0
            for x, p in zip(outcome, params):
                w *= p if x else 1 - p
            total += w
    return total


@pytest.mark.filterwarnings("ignore::sdsmec.errors.ConvergenceWarning")
def test_zero_weight_pair_has_pvalue_one():
    B = IncidenceMatrix([[1, 0], [0, 1], [1, 1]])
    pv = significance_matrix(B, estimate_q(B))
    assert pv[0, 1] == 1.0


def test_all_zero_q_gives_pvalue_zero_for_positive_weight():
    B = IncidenceMatrix([[1, 1], [1, 0]])
    pv = significance_matrix(B, ProbabilityMatrix(np.zeros((2, 2))))
    assert pv[0, 1] == 0.0


def test_matches_brute_force_on_4x4():
    B = IncidenceMatrix([[1, 1, 0, 1], [1, 1, 0, 0], [0, 1, 1, 0], [1, 1, 1, 1]])
    Q = estimate_q(B)
    pv = significance_matrix(B, Q)
    P = project(B).weights
    for i, j in itertools.combinations(range(4), 2):
        assert pv[i, j] == pytest.approx(brute_pvalue(Q.values[i], Q.values[j], P[i, j]), abs=1e-13)
        assert pv[i, j] == pv[j, i]
    assert np.isnan(np.diag(pv)).all()


def test_tiny_alpha_gives_empty_backbone():
    B = random_bipartite(10, 12, 0.5, seed=2)
    assert extract_backbone(B, alpha=1e-300).n_edges == 0


def test_toy_sdsm_ec_is_empty():
    B, mask = two_block(TOY_FIXTURE)
    assert extract_backbone(B, mask, 0.05, "sdsm-ec").edges() == []


def test_toy_sdsm_is_within_group():
    B, mask = two_block(TOY_FIXTURE)
    edges = extract_backbone(B, mask, 0.05, "sdsm").edges()
    assert edges
    assert all(a.split("_")[0] == b.split("_")[0] for a, b in edges)


def test_invalid_alpha():
    B = random_bipartite(3, 3, 0.5, seed=0)
    for alpha in (0.0, 1.0, -0.1, 2):
        with pytest.raises(ValueError):
            extract_backbone(B, alpha=alpha)


def test_constraint_violation_raises():
    B = IncidenceMatrix([[1, 0], [0, 1]])
    with pytest.raises(ConstraintViolationError) as info:
        extract_backbone(B, ConstraintMask([[1, 0], [0, 0]]))
    assert info.value.report.prohibited_violations == ((0, 0),)


@pytest.mark.filterwarnings("ignore::sdsmec.errors.ConvergenceWarning")
def test_strict_inequality_at_threshold():
    # p-value exactly alpha/2 must not be kept
    B = IncidenceMatrix([[1, 1], [1, 0]])
    bb = extract_backbone(B, alpha=0.5)
    q = bb.q.values
    # pair (0, 1) shares one artifact; p = 1 - (1 - q00 q10)(1 - q01 q11)
    expected = 1 - (1 - q[0, 0] * q[1, 0]) * (1 - q[0, 1] * q[1, 1])
    assert bb.pvalues[0, 1] == pytest.approx(expected, abs=1e-15)
    at_tie = extract_backbone(B, alpha=min(2 * bb.pvalues[0, 1], 0.999))
    assert at_tie.adjacency[0, 1] == int(bb.pvalues[0, 1] < at_tie.alpha / 2)


def _instance(seed, constrained=True):
    rng = np.random.default_rng(seed)
    r, c = int(rng.integers(4, 15)), int(rng.integers(4, 20))
    B = random_bipartite(r, c, float(rng.uniform(0.2, 0.8)), seed)
    mask = random_mask(B, 0.3, 0.05, seed + 1) if constrained else ConstraintMask.free(B.shape)
    return B, mask


@given(st.integers(0, 100_000), st.sampled_from(list(Model)))
@settings(max_examples=30, deadline=None)
def test_backbone_invariants(seed, model):
    B, mask = _instance(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        bb = extract_backbone(B, mask, 0.05, model)
    A, pv = bb.adjacency, bb.pvalues
    off = ~np.eye(B.n_agents, dtype=bool)
    assert (A == A.T).all() and not np.diag(A).any()
    np.testing.assert_array_equal(pv[off], pv.T[off])
    assert ((pv[off] >= 0) & (pv[off] <= 1)).all()
    np.testing.assert_array_equal(A[off] == 1, pv[off] < 0.025)
    assert bb.model is model and bb.alpha == 0.05


@given(st.integers(0, 100_000))
@settings(max_examples=20, deadline=None)
def test_models_agree_on_free_mask(seed):
    B, other = _instance(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        ec = extract_backbone(B, ConstraintMask.free(B.shape), 0.05, "sdsm-ec")
        plain = extract_backbone(B, other, 0.05, "sdsm")
    np.testing.assert_array_equal(ec.adjacency, plain.adjacency)
    np.testing.assert_array_equal(ec.pvalues, plain.pvalues)


def test_prohibition_dominance():
    # agents 0 and 1 can never share an artifact
    B = IncidenceMatrix([[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]])
    mask = ConstraintMask([[0, 0, 1, 1], [1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    bb = extract_backbone(B, mask, 0.05, "sdsm-ec")
    assert (bb.q.values[0] * bb.q.values[1] == 0).all()
    assert project(B).weights[0, 1] == 0
    assert bb.pvalues[0, 1] == 1.0
    assert bb.adjacency[0, 1] == 0


def test_significance_matrix_is_deterministic():
    B, mask = _instance(77)
    Q = estimate_q(B, mask)
    first = significance_matrix(B, Q)
    np.testing.assert_array_equal(first, significance_matrix(B, Q))


def test_edges_are_label_sorted():
    B, mask = two_block(TOY_FIXTURE)
    edges = extract_backbone(B, mask, 0.05, "sdsm").edges()
    assert all(a < b for a, b in edges)
    assert edges == sorted(edges)
