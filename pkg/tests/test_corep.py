from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suqhodge import corep, qalg
from suqhodge.corep import WIndex

Q = 0.5


@pytest.fixture(scope="module")
def ctx():
    return qalg.default_context(Q)


def test_weights_and_range():
    assert corep.weights(1) == [0]
    assert corep.weights(4) == [-3, -1, 1, 3]
    assert corep.in_range(3, 2) and not corep.in_range(3, 1) and not corep.in_range(3, 4)


def test_lambda_at_minus_half_is_minus_q_squared():
    assert corep.lambda_k(Q, -1) == pytest.approx(-Q * Q, rel=1e-14)
    assert corep.lambda_k(Q, 0) == 0.0


def test_c_vanishes_at_the_ends():
    for M in range(1, 8):
        m2 = M - 1
        assert corep.c_k(Q, M, -m2) == 0.0
        assert corep.c_k(Q, M, m2 + 2) == 0.0
    with pytest.raises(ValueError):
        corep.c_k(Q, 3, 6)


@pytest.mark.parametrize("M", range(1, 6))
def test_chi_functionals_reproduce_a_matrices(ctx, M):
    A = corep.a_matrices(Q, M)
    for r in (1, 2, 3):
        got = corep.functional_matrix(ctx, corep.chi_functional(ctx, r, exact=True), M)
        assert np.allclose(got, A[r], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("M", range(1, 6))
def test_nu_is_the_grade_zero_laplacian_entry(M):
    A = corep.a_matrices(Q, M)
    S = corep.chi_star_matrices(Q, M, "twisted")
    total = sum(S[r] @ A[r] for r in (1, 2, 3))
    nus = [corep.nu(Q, M, k2) for k2 in corep.weights(M)]
    assert np.allclose(total, np.diag(nus), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("involution", ["twisted", "plain"])
@pytest.mark.parametrize("M", range(1, 6))
def test_entry_norms_match_closed_form(ctx, M, involution):
    pbw = corep.entry_norms(ctx, M, involution)
    ks = corep.weights(M)
    for i, p2 in enumerate(ks):
        for j, k2 in enumerate(ks):
            assert pbw[i, j] == pytest.approx(corep.entry_norm(Q, M, p2, k2, involution), rel=1e-10)


@pytest.mark.parametrize("involution", ["twisted", "plain"])
def test_star_coefficients_match_closed_form(ctx, involution):
    for M in range(1, 6):
        for p2 in corep.weights(M):
            for k2 in corep.weights(M):
                w = WIndex(M, p2, k2)
                assert corep.star_coefficient(ctx, w, involution) == pytest.approx(
                    corep.star_sign(Q, w, involution), rel=1e-10
                )


@pytest.mark.parametrize("M", range(1, 6))
def test_entries_are_orthogonal(ctx, M):
    G = corep.entry_gram(ctx, M)
    off = G - np.diag(np.diag(G))
    assert np.abs(off).max() < 1e-10 * np.abs(np.diag(G)).max()


@pytest.mark.parametrize("M", range(1, 8))
def test_q_gram_is_diagonal_and_positive(ctx, M):
    Qm = corep.q_gram(ctx, M)
    d = np.real(np.diag(Qm))
    assert (d > 0).all()
    assert np.abs(Qm - np.diag(np.diag(Qm))).max() < 1e-10 * d.max()


@pytest.mark.parametrize("M", range(1, 5))
def test_corepresentation_identity(ctx, M):
    W = corep.build_w_pbw(ctx, M)
    for i in range(M):
        for j in range(M):
            lhs = qalg.comultiply(W[i][j])
            rhs = qalg.TensorElement.from_pairs(ctx, [(W[i][l], W[l][j]) for l in range(M)])
            assert (lhs - rhs).norm_inf() < 1e-10 * max(lhs.norm_inf(), 1.0)


windices = st.integers(1, 5).flatmap(
    lambda M: st.tuples(st.just(M), st.sampled_from(corep.weights(M)), st.sampled_from(corep.weights(M)))
)


@settings(max_examples=40, deadline=None)
@given(windices)
def test_generator_products_agree_with_entry_products(w):
    ctx = qalg.default_context(Q)
    w = WIndex(*w)
    via_entry = corep.multiply_w(ctx, WIndex(2, 1, 1), w)
    via_gen = corep.multiply_by_generator(ctx, "alpha", w)
    assert set(via_entry) == set(via_gen)
    for t in via_gen:
        assert via_entry[t] == pytest.approx(via_gen[t], rel=1e-10)


def test_products_land_on_shifted_weights(ctx):
    w1, w2 = WIndex(3, 2, 0), WIndex(2, -1, 1)
    out = corep.multiply_w(ctx, w1, w2)
    assert out
    for t in out:
        assert (t.p2, t.k2) == (1, 1)
        assert t.M in (2, 4)


def test_invalid_product_index_raises(ctx):
    with pytest.raises(ValueError):
        corep.multiply_w(ctx, WIndex(2, 0, 1), WIndex(1, 0, 0))


def test_entry_norm_is_independent_of_k_for_the_twisted_involution():
    vals = {corep.entry_norm(Q, 4, 1, k2, "twisted") for k2 in corep.weights(4)}
    assert len(vals) == 1
    assert math.isclose(vals.pop(), Q ** (1 + 3) * (1 - Q * Q) / (1 - Q**8))
