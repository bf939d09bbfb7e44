from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suqhodge import qalg

Q = 0.5


@pytest.fixture(scope="module")
def ctx():
    return qalg.default_context(Q)


def nf(ctx, *word, exact=False):
    return qalg.normal_form(ctx, [(g, 1) for g in word], exact=exact)


small_monos = st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 1))


def test_defining_relations(ctx):
    one = qalg.AlgElement.scalar(ctx, 1)
    assert (nf(ctx, "alpha*", "alpha") + nf(ctx, "gamma*", "gamma") - one).norm_inf() < 1e-12
    assert (nf(ctx, "alpha", "alpha*") + nf(ctx, "gamma*", "gamma").scale(Q * Q) - one).norm_inf() < 1e-12
    assert (nf(ctx, "gamma", "gamma*") - nf(ctx, "gamma*", "gamma")).norm_inf() < 1e-12
    assert (nf(ctx, "alpha", "gamma") - nf(ctx, "gamma", "alpha").scale(Q)).norm_inf() < 1e-12
    assert (nf(ctx, "alpha", "gamma*") - nf(ctx, "gamma*", "alpha").scale(Q)).norm_inf() < 1e-12


def test_orientation_is_unique():
    assert qalg.resolve_orientation(Q) == 1
    assert qalg.relation_defect(Q, 1) < 1e-10
    assert qalg.relation_defect(Q, -1) > 1e-6


def test_context_rejects_bad_q():
    with pytest.raises(ValueError):
        qalg.QContext(q=1.0)


@settings(max_examples=40, deadline=None)
@given(small_monos, small_monos)
def test_star_is_antimultiplicative(m1, m2):
    ctx = qalg.default_context(Q)
    a, b = qalg.monomial(ctx, *m1, exact=True), qalg.monomial(ctx, *m2, exact=True)
    lhs = qalg.star(a * b)
    rhs = qalg.star(b) * qalg.star(a)
    assert (lhs - rhs).norm_inf() == 0
    assert (qalg.star(qalg.star(a)) - a).norm_inf() == 0


@settings(max_examples=30, deadline=None)
@given(small_monos, small_monos)
def test_coproduct_and_counit_are_multiplicative(m1, m2):
    ctx = qalg.default_context(Q)
    a, b = qalg.monomial(ctx, *m1, exact=True), qalg.monomial(ctx, *m2, exact=True)
    assert (qalg.comultiply(a * b) - qalg.comultiply(a) * qalg.comultiply(b)).norm_inf() == 0
    assert qalg.counit(a * b) == qalg.counit(a) * qalg.counit(b)


def test_coproduct_of_alpha(ctx):
    t = qalg.comultiply(qalg.generator(ctx, "alpha", exact=True))
    expect = qalg.TensorElement.from_pairs(
        ctx,
        [
            (qalg.generator(ctx, "alpha", exact=True), qalg.generator(ctx, "alpha", exact=True)),
            (qalg.generator(ctx, "gamma*", exact=True).scale(-ctx.qx), qalg.generator(ctx, "gamma", exact=True)),
        ],
    )
    assert (t - expect).norm_inf() == 0


@pytest.mark.parametrize("n", range(6))
def test_haar_on_powers_of_c(ctx, n):
    c_n = qalg.monomial(ctx, 0, 0, n, exact=True)
    q = ctx.qx
    assert qalg.haar(c_n) == (1 - q * q) / (1 - q ** (2 * n + 2))


def test_haar_vanishes_off_the_diagonal_sector(ctx):
    for m in [(1, 0, 0), (0, 1, 1), (-2, 1, 0), (1, -1, 2)]:
        assert qalg.haar(qalg.monomial(ctx, *m, exact=True)) == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(small_monos, st.integers(-3, 3).filter(bool)), min_size=1, max_size=4))
def test_haar_is_positive(terms):
    ctx = qalg.default_context(Q)
    a = qalg.AlgElement(ctx, {m: Fraction(c) for m, c in terms}, exact=True)
    if not a.terms:
        return
    assert qalg.haar(qalg.star(a) * a) > 0
    assert qalg.haar_inner(a, a, "twisted") > 0


def test_twisted_star_is_scaled_star(ctx):
    a = qalg.monomial(ctx, 2, -1, 1) + qalg.monomial(ctx, -1, 2, 0).scale(3.0)
    lhs = qalg.twisted_star(a)
    rhs = qalg.apply_group("tau", -1j, qalg.star(a))
    assert (lhs - rhs).norm_inf() < 1e-12


@pytest.mark.parametrize(
    "group,z,gen,factor",
    [
        ("rho", 0.3, "alpha", Q ** (-2j * 0.3)),
        ("rho", 0.3, "gamma", 1.0),
        ("tau", 0.3, "alpha", 1.0),
        ("tau", 0.3, "gamma", Q ** (2j * 0.3)),
        ("sigmaA", 0, "alpha", Q**-2),
        ("phi", 0, "alpha", Q**-1),
        ("phi", 0, "gamma", Q**-2),
        ("betaA", 0.3, "alpha", Q ** (2j * 0.3)),
        ("betaA", 0.3, "gamma", Q ** (4j * 0.3)),
    ],
)
def test_group_actions_on_generators(ctx, group, z, gen, factor):
    x = qalg.generator(ctx, gen)
    assert (qalg.apply_group(group, z, x) - x.scale(factor)).norm_inf() < 1e-12


def test_beta_at_i_is_sigma(ctx):
    a = qalg.monomial(ctx, 2, -1, 1) + qalg.monomial(ctx, -1, 2, 0)
    assert (qalg.apply_group("betaA", 1j, a) - qalg.apply_group("sigmaA", 0, a)).norm_inf() < 1e-12


@settings(max_examples=30, deadline=None)
@given(small_monos, small_monos, st.sampled_from(["rho", "tau", "sigmaA", "phi", "betaA"]))
def test_group_actions_are_automorphisms(m1, m2, group):
    ctx = qalg.default_context(Q)
    z = 0.4 + 0.2j
    a, b = qalg.monomial(ctx, *m1), qalg.monomial(ctx, *m2)
    lhs = qalg.apply_group(group, z, a * b)
    rhs = qalg.apply_group(group, z, a) * qalg.apply_group(group, z, b)
    scale = max(lhs.norm_inf(), 1.0)
    assert (lhs - rhs).norm_inf() <= 1e-10 * scale


def test_kms_condition_small(ctx):
    for m1 in [(1, 0, 0), (0, 1, 0), (1, -1, 1)]:
        for m2 in [(-1, 0, 0), (0, -1, 0), (-1, 1, 0)]:
            a, b = qalg.monomial(ctx, *m1, exact=True), qalg.monomial(ctx, *m2, exact=True)
            lhs = complex(qalg.haar(a * b))
            rhs = qalg.haar(qalg.apply_group("rho", 1j, b.to_float()) * a.to_float())
            assert cmath.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-14)
