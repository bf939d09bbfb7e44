from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suqhodge import calculus as cal
from suqhodge import corep, suites
from suqhodge.calculus import BASIS, GRADE, Calculus, Form
from suqhodge.corep import WIndex

Q = 0.5
ONE = WIndex(1, 0, 0)


@pytest.fixture(scope="module")
def calc():
    return Calculus(Q, "twisted", 1e-15, 12)


def basis(calc, b, coef=1.0):
    return Form.basis(calc, ONE, b, coef)


def single(form: Form) -> tuple[str, complex]:
    (key, c), = form.terms.items()
    return key[3], c


def test_hodge_table_twisted():
    table = cal.InvariantExterior(Q, "twisted").hodge_table
    expect = {
        "1": ("tau", 1.0),
        "e1": ("e12", Q**-7),
        "e2": ("e31", -(Q**-6)),
        "e3": ("e23", Q),
        "e12": ("e1", Q**7),
        "e23": ("e3", Q**-1),
        "e31": ("e2", -(Q**6)),
        "tau": ("1", 1.0),
    }
    for b, (target, coef) in expect.items():
        got_t, got_c = table[b]
        assert got_t == target
        assert got_c == pytest.approx(coef, rel=1e-12)


def test_hodge_table_plain_is_q_shifted():
    table = cal.InvariantExterior(Q, "plain").hodge_table
    assert table["e1"][1] == pytest.approx(Q**-5, rel=1e-12)
    assert table["e3"][1] == pytest.approx(Q**-1, rel=1e-12)


@pytest.mark.parametrize("involution", ["twisted", "plain"])
def test_exterior_product_is_associative(involution):
    ext = cal.InvariantExterior(Q, involution)
    for a, b, c in itertools.product(BASIS, repeat=3):
        A, B, C = ext.left_mult(a), ext.left_mult(b), ext.left_mult(c)
        assert np.allclose(A @ (B @ C), (A @ B) @ C, atol=1e-12)


def test_star_on_invariant_forms(calc):
    q = Q
    eta1, eta3 = basis(calc, "e1"), basis(calc, "e3")
    assert single(cal.star(eta1)) == ("e3", pytest.approx(q))
    assert single(cal.star(eta3)) == ("e1", pytest.approx(1 / q))
    assert single(cal.star(basis(calc, "e2"))) == ("e2", pytest.approx(-1.0))
    assert single(cal.star(basis(calc, "tau"))) == ("tau", pytest.approx(1.0))


@pytest.mark.parametrize("b,factor", [("e1", Q**9 * (1 + Q * Q)), ("e2", Q**5), ("e3", Q * (1 + Q * Q))])
def test_l_d_on_invariant_one_forms(calc, b, factor):
    got_b, got_c = single(cal.hodge(cal.differential(basis(calc, b))))
    assert got_b == b
    assert got_c == pytest.approx(factor, rel=1e-12)


@pytest.mark.parametrize("b,factor", [("e1", Q**6), ("e2", 1.0), ("e3", Q**-6), ("e12", Q**6), ("e23", Q**-6), ("e31", 1.0), ("tau", 1.0)])
def test_twist_on_invariant_forms(calc, b, factor):
    assert single(cal.twist(basis(calc, b))) == (b, pytest.approx(factor))


@pytest.mark.parametrize("z", [0.3, 1j, 1 + 1j])
def test_beta_on_invariant_forms(calc, z):
    got = cal.group_beta(z, basis(calc, "e1") + basis(calc, "e3"))
    assert got.terms[(1, 0, 0, "e1")] == pytest.approx(Q ** (-6j * z))
    assert got.terms[(1, 0, 0, "e3")] == pytest.approx(Q ** (6j * z))


def test_twist_on_coefficients(calc):
    w = WIndex(3, 2, -2)
    got = cal.twist(Form.basis(calc, w, "1"))
    assert got.terms[(3, 2, -2, "1")] == pytest.approx(Q ** (2 - 3 * -2))


def test_integral_picks_the_volume_form(calc):
    f = basis(calc, "tau", 2.0) + basis(calc, "e1") + Form.basis(calc, WIndex(3, 0, 0), "tau")
    assert cal.integral(f) == pytest.approx(2.0)


def test_form_validation(calc):
    with pytest.raises(ValueError):
        Form(calc, {(2, 0, 1, "e1"): 1.0})
    with pytest.raises(ValueError):
        Form(calc, {(1, 0, 0, "e4"): 1.0})


def test_wedge_beyond_truncation_raises():
    small = Calculus(Q, "twisted", 1e-15, 4)
    a = Form.basis(small, WIndex(3, 0, 0), "1")
    with pytest.raises(ValueError):
        cal.wedge(a, a)


def test_rebalance_rejects_even_dimension():
    with pytest.raises(ValueError):
        cal.rebalance_inner_product(np.eye(8), np.eye(8), n=2)


def test_rebalanced_gram_diagonal():
    g = np.real(np.diag(cal.InvariantExterior(Q, "twisted").gram))
    idx = {b: i for i, b in enumerate(BASIS)}
    assert g[idx["e12"]] == pytest.approx(Q**14)
    assert g[idx["e23"]] == pytest.approx(Q**-2)
    assert g[idx["e31"]] == pytest.approx(Q**12)
    for b in ("1", "e1", "e2", "e3", "tau"):
        assert g[idx[b]] == pytest.approx(1.0)


@pytest.mark.parametrize("involution", ["twisted", "plain"])
def test_calculus_axioms_sampled(involution):
    calc = Calculus(Q, involution, 1e-15, 12)
    res = suites.calculus_residuals(calc, seed=7, n=25, max_M=5, leibniz_M=3)
    for name, (r, where) in res.items():
        assert r < 1e-8, f"{name}: {r} at sample {where}"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_star_is_an_involution_and_commutes_with_d(seed):
    calc = Calculus(Q, "twisted", 1e-15, 12)
    rng = np.random.default_rng(seed)
    a = cal.random_form(calc, rng, max_M=4)
    assert suites._rel(cal.star(cal.star(a)), a) < 1e-12
    assert suites._rel(cal.differential(cal.star(a)), cal.star(cal.differential(a))) < 1e-10
    assert suites._rel(cal.twist(cal.star(cal.twist(cal.star(a)))), a) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inner_product_is_hermitian_and_positive(seed):
    calc = Calculus(Q, "twisted", 1e-15, 12)
    rng = np.random.default_rng(seed)
    a, b = cal.random_form(calc, rng, max_M=4), cal.random_form(calc, rng, max_M=4)
    assert cal.form_inner(a, b) == pytest.approx(np.conj(cal.form_inner(b, a)), rel=1e-12, abs=1e-14)
    assert cal.form_inner(a, a).real > 0


def test_plain_involution_swaps_q_powers_in_the_zero_form_laplacian():
    """With the plain involution the 0-form eigenvalue is q^2 c_{k+1}^2 + lambda_k^2 + c_k^2."""
    M, p2, k2 = 4, 1, -1
    for involution in ("twisted", "plain"):
        calc = Calculus(Q, involution, 0.0, 8)
        f = Form.basis(calc, WIndex(M, p2, k2), "1")
        lap = cal.codifferential(cal.differential(f))
        got = lap.terms[(M, p2, k2, "1")].real
        c1, c0, lam = corep.c_k(Q, M, k2 + 2), corep.c_k(Q, M, k2), corep.lambda_k(Q, k2)
        expect = corep.nu(Q, M, k2) if involution == "twisted" else Q * Q * c1**2 + lam**2 + c0**2
        assert got == pytest.approx(expect, rel=1e-12)


def test_block_keys_and_operator_matrix(calc):
    keys = cal.block_keys(3, 0, 0)
    assert [k[3] for k in keys] == list(BASIS)
    assert [GRADE[k[3]] for k in keys] == [0, 1, 1, 1, 2, 2, 2, 3]
    D = cal.operator_matrix(calc, cal.differential, keys, keys)
    assert np.abs(D @ D).max() < 1e-10 * np.abs(D).max() ** 2
    with pytest.raises(ValueError):
        cal.operator_matrix(calc, cal.differential, keys, keys[:2])
