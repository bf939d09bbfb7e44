"""Named verification suites shared by the CLI and the test-suite.

Each suite returns a list of :class:`CheckResult`; a check passes when its worst
residual is below its own threshold.  Failing checks name the first offending
block or sample in ``detail``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import calculus as cal
from . import corep, qalg
from . import spectral as sp
from .calculus import BASIS, GRADE, Calculus, Form
from .corep import WIndex

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _check(name: str, residual: float, threshold: float, detail: str = "") -> CheckResult:
    ok = bool(np.isfinite(residual) and residual < threshold)
    return CheckResult(name, ok, float(residual), threshold, "" if ok else detail)


def _worst(items, fn: Callable) -> tuple[float, object]:
    """Largest ``fn(item)`` and the item attaining it."""
    worst, where = 0.0, None
    for it in items:
        r = fn(it)
        if not r <= worst:  # also catches nan
            worst, where = r, it
    return worst, where


# --- algebra ----------------------------------------------------------------------


def _monomials(max_degree: int) -> list[qalg.Mono]:
    out = []
    for k in range(-max_degree, max_degree + 1):
        for l in range(-max_degree, max_degree + 1):
            for n in range(max_degree // 2 + 1):
                if abs(k) + abs(l) + 2 * n <= max_degree:
                    out.append((k, l, n))
    return out


def corep_residual(ctx: qalg.QContext, M: int) -> float:
    """``max |Delta(W_ij) - sum_l W_il (x) W_lj|`` relative to the entry size."""
    W = corep.build_w_pbw(ctx, M)
    worst = 0.0
    for i in range(M):
        for j in range(M):
            lhs = qalg.comultiply(W[i][j])
            rhs = qalg.TensorElement.from_pairs(ctx, [(W[i][l], W[l][j]) for l in range(M)])
            diff = (lhs - rhs).norm_inf()
            worst = max(worst, diff / max(lhs.norm_inf(), 1e-300))
    return worst


def suite_algebra(q: float, max_M: int = 7, tol: float = 1e-9, **_) -> list[CheckResult]:
    ctx = qalg.default_context(q)
    out = []
    Ms = range(1, min(max_M, 5) + 1)
    r, where = _worst(Ms, lambda M: corep_residual(ctx, M))
    out.append(_check("corepresentation identity (M<=5)", r, 1e-10, f"M={where}"))

    monos = _monomials(4)

    def haar_inv(m):
        a = qalg.monomial(ctx, *m, exact=True)
        t = qalg.comultiply(a)
        h = qalg.haar(a)
        left = t.apply_left(lambda x: qalg.haar_mono(ctx, x, exact=True)) - qalg.AlgElement.scalar(ctx, h, exact=True)
        right = t.apply_right(lambda x: qalg.haar_mono(ctx, x, exact=True)) - qalg.AlgElement.scalar(ctx, h, exact=True)
        return max(left.norm_inf(), right.norm_inf())

    r, where = _worst(monos, haar_inv)
    out.append(_check("Haar invariance (degree<=4)", r, 1e-10, f"monomial={where}"))

    def kms(pair):
        a = qalg.monomial(ctx, *pair[0], exact=True)
        b = qalg.monomial(ctx, *pair[1], exact=True)
        lhs = complex(qalg.haar(a * b))
        rhs = qalg.haar(qalg.apply_group("rho", 1j, b.to_float()) * a.to_float())
        return abs(lhs - rhs) / max(1.0, abs(lhs))

    r, where = _worst(itertools.product(monos, monos), kms)
    out.append(_check("KMS h(ab)=h(rho_i(b)a) (degree<=4)", r, 1e-10, f"pair={where}"))

    def qgram(M):
        Q = corep.q_gram(ctx, M)
        d = np.real(np.diag(Q))
        off = np.abs(Q - np.diag(np.diag(Q))).max(initial=0.0) / d.max()
        return off if d.min() > 0 else math.inf

    r, where = _worst(range(1, min(max_M, 7) + 1), qgram)
    out.append(_check("Q_M diagonal and positive (M<=7)", r, 1e-10, f"M={where}"))

    def ortho(M):
        G = corep.entry_gram(ctx, M)
        d = np.abs(np.diag(G))
        return np.abs(G - np.diag(np.diag(G))).max(initial=0.0) / d.max()

    r, where = _worst(range(1, min(max_M, 5) + 1), ortho)
    out.append(_check("entry orthogonality h(W*W')=0 (M<=5)", r, 1e-10, f"M={where}"))
    return out


# --- calculus ---------------------------------------------------------------------


def _rel(a: Form, b: Form, scale: float = 0.0) -> float:
    """Sup-norm of ``a - b`` relative to the larger side, or to ``scale`` if that is larger.

    Pass ``scale`` when a side is a sum whose terms may cancel, so rounding noise
    left by the cancellation is measured against the terms rather than against itself.
    """
    scale = max(a.norm_inf(), b.norm_inf(), scale, 1e-300)
    return (a - b).norm_inf() / scale


def _homogeneous_parts(a: Form) -> list[tuple[int, Form]]:
    return [(g, Form(a.calc, {k: c for k, c in a.terms.items() if GRADE[k[3]] == g})) for g in sorted(a.grades())]


def calculus_residuals(calc: Calculus, seed: int, n: int = 100, max_M: int = 7, leibniz_M: int = 4) -> dict[str, tuple[float, int]]:
    """Worst residual of each calculus axiom over ``n`` seeded random forms.

    Leibniz pairs use a second factor with ``M <= leibniz_M`` so that products stay
    within the calculus truncation.
    """
    rng = np.random.default_rng(seed)
    res: dict[str, tuple[float, int]] = {}

    def note(name: str, r: float, i: int) -> None:
        if name not in res or not r <= res[name][0]:
            res[name] = (r, i)

    d, ds, L = cal.differential, cal.codifferential, cal.hodge
    for i in range(n):
        a = cal.random_form(calc, rng, max_M=max_M)
        b = cal.random_form(calc, rng, max_M=max_M)
        c = cal.random_form(calc, rng, max_M=leibniz_M, n_terms=3)
        da = d(a)
        note("d^2 = 0", d(da).norm_inf() / max(a.norm_inf(), 1e-300), i)
        leib = 0.0
        for ga, pa in _homogeneous_parts(a):
            lhs = d(cal.wedge(pa, c))
            t1, t2 = cal.wedge(d(pa), c), cal.wedge(pa, d(c)).scale((-1) ** ga)
            leib = max(leib, _rel(lhs, t1 + t2, max(t1.norm_inf(), t2.norm_inf())))
        note("graded Leibniz", leib, i)
        note("d(w*) = (dw)*", _rel(d(cal.star(a)), cal.star(da)), i)
        lhs = cal.form_inner(da, b)
        rhs = cal.form_inner(a, ds(b))
        note("<dw,v> = <w,d*v>", abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300), i)
        formula = Form(calc, {})
        for g, part in _homogeneous_parts(a):
            formula = formula + cal.hodge_inverse(d(L(part))).scale((-1) ** g)
        note("d* = (-1)^k L^-1 d L", _rel(ds(a), formula), i)
        la, lb = cal.form_inner(L(a), L(b)), cal.form_inner(a, b)
        note("L unitary", abs(la - lb) / max(abs(lb), 1e-300), i)
        note("L^2 = id", _rel(L(L(a)), a), i)
        lap = lambda f: d(ds(f)) + ds(d(f))  # noqa: E731
        note("L nabla = nabla L", _rel(L(lap(a)), lap(L(a))), i)
    basis_res = 0.0
    for bname in BASIS:
        f = Form.basis(calc, WIndex(1, 0, 0), bname)
        basis_res = max(basis_res, _rel(L(L(f)), f))
    note("L^2 = id on invariant basis", basis_res, -1)
    return res


def suite_calculus(q: float, seed: int = 42, tol: float = 1e-9, n_samples: int = 100, **_) -> list[CheckResult]:
    out = []
    for inv in ("twisted",):
        calc = Calculus(q, inv, 1e-15, 14)
        for name, (r, i) in calculus_residuals(calc, seed, n_samples).items():
            out.append(_check(name, r, 1e-8, f"sample={i}"))
    return out


# --- twist and one-parameter groups ---------------------------------------------------------


def _paired(calc: Calculus, rng: np.random.Generator, max_M: int = 3) -> tuple[Form, Form]:
    """A random form and a partner whose product has a nonzero volume part."""
    a = cal.random_form(calc, rng, max_M=max_M, n_terms=3)
    partner = {}
    for M, p2, k2, _ in a.terms:
        for b in BASIS:
            partner[(M, -p2, -k2, b)] = complex(rng.normal(), rng.normal())
    return a, Form(calc, partner)


def twisted_trace_residual(a: Form, b: Form) -> tuple[float, float]:
    """``|int b a - (-1)^{kl} int sigma(a) b|`` over homogeneous parts; also the largest integral."""
    worst = scale = 0.0
    for ga, pa in _homogeneous_parts(a):
        for gb, pb in _homogeneous_parts(b):
            lhs = cal.integral(cal.wedge(pb, pa))
            rhs = (-1) ** (ga * gb) * cal.integral(cal.wedge(cal.twist(pa), pb))
            worst = max(worst, abs(lhs - rhs))
            scale = max(scale, abs(lhs))
    return worst, scale


def suite_twist(q: float, seed: int = 42, n_samples: int = 60, **_) -> list[CheckResult]:
    calc = Calculus(q, "twisted", 1e-15, 12)
    rng = np.random.default_rng(seed)
    out = []
    pos = integ = beta_i = lbeta = 0.0
    for _ in range(n_samples):
        w = cal.random_form(calc, rng, max_M=5)
        norm2 = cal.form_inner(w, w).real
        v = cal.form_inner(cal.twist(w), w)
        pos = max(pos, -v.real / norm2, abs(v.imag) / norm2)
        integ = max(integ, abs(cal.integral(cal.twist(w)) - cal.integral(w)) / max(w.norm_inf(), 1e-300))
        beta_i = max(beta_i, _rel(cal.group_beta(1j, w), cal.twist(w)))
        for z in (0.3, 1j, 1 + 1j):
            lbeta = max(lbeta, _rel(cal.hodge(cal.group_beta(z, w)), cal.group_beta(z, cal.hodge(w))))
    out.append(_check("twist positivity <sigma(w)|w> >= 0", pos, 1e-10))
    out.append(_check("integral of sigma(w) = integral of w", integ, 1e-10))
    tt = 0.0
    for x in BASIS:
        for y in BASIS:
            fx, fy = Form.basis(calc, WIndex(1, 0, 0), x), Form.basis(calc, WIndex(1, 0, 0), y)
            tt = max(tt, twisted_trace_residual(fx, fy)[0])
    out.append(_check("twisted trace on invariant basis pairs", tt, 1e-10))
    tt = 0.0
    for _ in range(n_samples):
        a, b = _paired(calc, rng)
        r, s = twisted_trace_residual(a, b)
        tt = max(tt, r / max(s, 1e-300))
    out.append(_check("twisted trace on sampled pairs", tt, 1e-10))
    out.append(_check("beta_i = sigma", beta_i, 1e-10))
    out.append(_check("L beta_z = beta_z L, z in {0.3, i, 1+i}", lbeta, 1e-10))
    ctx = qalg.default_context(q)
    phi2 = tens = invol = 0.0
    for g in ("alpha", "gamma", "alpha*", "gamma*"):
        x = qalg.generator(ctx, g)
        phi = lambda a: qalg.apply_group("phi", 0, a)  # noqa: E731
        phi2 = max(phi2, (phi(phi(x)) - qalg.apply_group("sigmaA", 0, x)).norm_inf())
        invol = max(invol, (phi(qalg.star(phi(qalg.star(x)))) - x).norm_inf())
        lhs = qalg.apply_group_tensor(("tau", 0.5j), ("phi", 0), qalg.comultiply(x))
        tens = max(tens, (lhs - qalg.comultiply(phi(x))).norm_inf())
    out.append(_check("phi^2 = sigma on generators", phi2, 1e-12))
    out.append(_check("phi(phi(a*)*) = a on generators", invol, 1e-12))
    out.append(_check("(tau_{i/2} x phi) Delta = Delta phi on generators", tens, 1e-12))
    return out


# --- spectra ----------------------------------------------------------------------


def identity_residuals(q: float, max_M: int) -> dict[str, tuple[float, tuple[int, int]]]:
    """Residuals of the scalar identities behind the closed forms."""
    res: dict[str, tuple[float, tuple[int, int]]] = {}

    def note(name, r, where):
        if name not in res or r > res[name][0]:
            res[name] = (r, where)

    # The scalar identities are rational in q; floats would lose ~q^(-2M) in absolute
    # terms, so they are evaluated exactly at the binary value of q.
    qx = Fraction(q)
    for M in range(1, max_M + 1):
        for k2 in corep.weights(M):
            c2 = lambda j2: corep.c_k_squared(qx, M, j2)  # noqa: E731
            r = corep.lambda_k(qx, k2) - (c2(k2) - qx * qx * c2(k2 + 2))
            note("lambda_k = c_k^2 - q^2 c_{k+1}^2", abs(float(r)), (M, k2))
        for k2 in sp.block_ks(M):
            lam, lam1 = corep.lambda_k(qx, k2), corep.lambda_k(qx, k2 - 2)
            r = qx**9 * (1 + qx * qx) - qx**11 * lam + qx**7 * lam1
            note("q^9(1+q^2) - q^11 lambda_k = -q^7 lambda_{k-1}", abs(float(r)), (M, k2))
            if sp.e1_dim(M, k2) != 3:
                continue
            T = sp.t_block(q, M, k2)
            minors = T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0] + T[1, 1] * T[2, 2] - T[1, 2] * T[2, 1] + T[0, 0] * T[2, 2]
            scale = max(1.0, abs(minors))
            note("C_k = -q^10 nu_k", abs(minors + q**10 * corep.nu(q, M, k2)) / scale, (M, k2))
            note("det T_E = 0", abs(np.linalg.det(T)) / max(1.0, np.abs(T).max() ** 3), (M, k2))
            note("trace T_E = B_k", abs(np.trace(T) - sp.b_coeff(q, k2)) / max(1.0, abs(sp.b_coeff(q, k2))), (M, k2))
    return res


def spectrum_residual(q: float, max_M: int) -> tuple[float, tuple[int, int] | None]:
    calc = cal.get_calculus(q)
    worst, where = 0.0, None
    for M in range(1, max_M + 1):
        for k2 in sp.block_ks(M):
            r = sp.match_spectra(sp.laplacian_block_bruteforce(calc, M, k2), sp.eigen_closed_form(q, M, k2), 1e-300)
            if not r <= worst:
                worst, where = r, (M, k2)
    return worst, where


def m1_values(q: float) -> dict[int, float]:
    return {-2: q**18 * (1 + q * q) ** 2, 0: q**10, 2: q**2 * (1 + q * q) ** 2}


def suite_spectrum(q: float, max_M: int = 9, **_) -> list[CheckResult]:
    out = []
    r, where = spectrum_residual(q, max_M)
    out.append(_check(f"brute force = closed form on E_1 (M<={max_M})", r, 1e-7, f"(M, k2)={where}"))
    calc = cal.get_calculus(q)
    m1 = 0.0
    for k2, v in m1_values(q).items():
        got = sp.laplacian_block_bruteforce(calc, 1, k2)
        m1 = max(m1, abs(got[0] - v) / v if len(got) == 1 else math.inf)
    out.append(_check("M=1 spot values", m1, 1e-12))
    for name, (r, where) in identity_residuals(q, max_M).items():
        out.append(_check(name, r, 1e-9, f"(M, k2)={where}"))
    return out


def suite_estimates(q: float, max_M: int = 9, **_) -> list[CheckResult]:
    out = []
    for method in ("closed-form", "brute-force"):
        rep = sp.verify_estimate(q, max_M, method)
        first = rep.violations[0] if rep.violations else {}
        name = f"min eig >= C(q) max(q^-8k, 1) [{method}] (violations)"
        out.append(_check(name, len(rep.violations), 0.5, f"first violation {first}"))
    return out


def suite_hodge(q: float, max_M: int = 7, **_) -> list[CheckResult]:
    calc = cal.get_calculus(q)
    out = []
    dims = orth = dirac = adj = 0.0
    kernel = True
    bad = None
    for M in range(1, max_M + 1):
        rep = sp.hodge_decomposition_check(calc, M)
        miss = abs(rep.dim_harmonic + rep.rank_d + rep.rank_dstar - rep.dim)
        if miss and bad is None:
            bad = M
        dims = max(dims, miss)
        orth = max(orth, rep.orthogonality)
        dirac = max(dirac, rep.dirac_residual)
        adj = max(adj, rep.adjoint_residual)
        kernel &= rep.kernel_match
        if M == 1 and sorted(k[3] for k in rep.harmonic_keys) != ["1", "tau"]:
            kernel = False
    out.append(_check("dim ker nabla + rank d + rank d* = dim", dims, 0.5, f"M={bad}"))
    out.append(_check("mutual orthogonality", orth, 1e-8))
    out.append(_check("ker nabla = ker d meet ker d* (M=1: span{1, tau})", 0.0 if kernel else 1.0, 0.5))
    out.append(_check("Dirac squares reproduce nabla", dirac, 1e-7))
    out.append(_check("d* adjoint of d in block frames", adj, 1e-8))
    return out


def suite_blockmatrix(q: float, max_M: int = 9, **_) -> list[CheckResult]:
    calc = cal.get_calculus(q)
    out = []
    for grade in (0, 1, 2, 3):
        worst, where = 0.0, None
        for M in range(1, max_M + 1):
            gb = sp.general_block_spectrum(calc, M, grade)
            bf = []
            for k2 in sp.block_ks(M):
                bf += sp.laplacian_block_bruteforce(calc, M, k2, p2=corep.weights(M)[0], grade=grade)
            r = sp.match_spectra(gb, bf, 1e-300)
            if not r <= worst:
                worst, where = r, M
        out.append(_check(f"block matrix = brute force, grade {grade}", worst, 1e-7, f"M={where}"))
    return out


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "algebra": suite_algebra,
    "calculus": suite_calculus,
    "twist": suite_twist,
    "spectrum": suite_spectrum,
    "estimates": suite_estimates,
    "hodge": suite_hodge,
    "blockmatrix": suite_blockmatrix,
}


def run_suite(name: str, q: float, max_M: int, seed: int, tol: float) -> list[CheckResult]:
    if name == "all":
        return [r for n in SUITES for r in run_suite(n, q, max_M, seed, tol)]
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'") from None
    return fn(q=q, max_M=max_M, seed=seed, tol=tol)
