"""Structured Lyapunov-like bases against the numeric rank oracle."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import mesoc_kit as mk
from mesoc_kit import sampling

MESOC_SHAPES = [(2, 1), (2, 2), (3, 2), (2, 3), (4, 1), (3, 0)]


def test_basis_counts():
    for p in range(1, 6):
        assert len(mk.lyap_basis_monotone_nonneg(p)) == p
    for p, q in MESOC_SHAPES:
        expect = p + q * (q + 1) // 2
        assert len(mk.lyap_basis_mesoc(p, q)) == expect
        assert mk.predicted_rank(mk.mesoc(p, q)) == expect


def test_basis_is_linearly_independent():
    for p, q in MESOC_SHAPES:
        basis = mk.lyap_basis_mesoc(p, q)
        stack = np.array([b.entries.ravel() for b in basis])
        assert np.linalg.matrix_rank(stack) == len(basis)


def test_basis_matrices_are_lyapunov_like(rng):
    for p, q in MESOC_SHAPES:
        cone = mk.mesoc(p, q)
        pairs = list(zip(*sampling.complementarity_pairs(cone, rng, 500)))
        for b in mk.lyap_basis_mesoc(p, q):
            chk = mk.is_lyapunov_like(b, cone, pairs=pairs)
            assert chk.ok, (p, q, b.params, chk.max_residual)
    for p in (2, 3, 4):
        cone = mk.monotone_nonneg(p)
        for b in mk.lyap_basis_monotone_nonneg(p):
            assert mk.is_lyapunov_like(b, cone, n_pairs=500, seed=3).ok


def test_random_combinations_of_head_basis_stay_lyapunov_like(rng):
    # the property is linear, so any combination of basis elements keeps it
    cone = mk.monotone_nonneg(4)
    basis = mk.lyap_basis_monotone_nonneg(4)
    Z, W = sampling.complementarity_pairs(cone, sampling.rng_from_seed(3), 400)
    pairs = list(zip(Z, W))
    for _ in range(5):
        T = sum(c * m.entries for c, m in zip(rng.normal(size=len(basis)), basis))
        assert mk.is_lyapunov_like(T, cone, pairs=pairs).ok


def test_detects_a_non_lyapunov_matrix():
    cone = mk.mesoc(2, 2)
    chk = mk.is_lyapunov_like(np.diag([1.0, 0.0, 0.0, 0.0]), cone, n_pairs=200, seed=0)
    assert not chk.ok and chk.witness is not None
    z, w = chk.witness
    assert abs(w @ np.diag([1.0, 0.0, 0.0, 0.0]) @ z) > 1e-6


def test_numeric_rank_matches_closed_form():
    for p, q in MESOC_SHAPES:
        res = mk.lyapunov_rank_numeric(mk.mesoc(p, q), n_pairs=300, seed=1)
        assert res.rank == mk.predicted_rank(mk.mesoc(p, q)), (p, q)
        assert res.matrix_dim == p + q
        assert res.singular_gap > 1e6  # the spectrum cutoff is unambiguous
    for p in (2, 3, 4):
        assert mk.lyapunov_rank_numeric(mk.monotone_nonneg(p), seed=2).rank == p
    assert mk.lyapunov_rank_numeric(mk.nonneg_orthant(5), seed=3).rank == 5
    assert mk.lyapunov_rank_numeric(mk.lorentz(4), seed=4).rank == 7


def test_single_x_column_matches_second_order_cone():
    # with one ordered coordinate the cone is a plain second order cone, and
    # the two rank routes must agree on that reading
    a = mk.lyapunov_rank_numeric(mk.mesoc(1, 2), seed=5)
    b = mk.lyapunov_rank_numeric(mk.lorentz(3), seed=6)
    assert a.rank == b.rank == 4 == mk.predicted_rank(mk.mesoc(1, 2))


def test_rank_one_dimensional_edge():
    assert mk.lyapunov_rank_numeric(mk.lorentz(1), seed=0).rank == 1


def test_basis_spans_the_numeric_null_space(rng):
    cone = mk.mesoc(2, 2)
    Z, W = sampling.complementarity_pairs(cone, rng, 800)
    rows = np.einsum("ik,il->ikl", W, Z).reshape(len(Z), -1)
    basis = mk.lyap_basis_mesoc(2, 2)
    # every structured matrix annihilates every sampled constraint row...
    for b in basis:
        assert np.abs(rows @ b.entries.ravel()).max() < 1e-10
    # ...and the constraint null space has no room for anything else
    null_dim = 16 - np.linalg.matrix_rank(rows, tol=1e-8)
    assert null_dim == len(basis)


def test_unsupported_predictions_raise():
    with pytest.raises(mk.UnsupportedConeError):
        mk.predicted_rank(mk.monotone(3))
    with pytest.raises(mk.UnsupportedConeError):
        mk.lyapunov_rank_numeric(mk.esoc(2, 2))


def test_lyap_matrix_container():
    b = mk.lyap_basis_mesoc(2, 2)[0]
    assert b.dim == 4 and b.params == {"diag": 1.0}
    assert_allclose(b.entries, np.eye(4))
