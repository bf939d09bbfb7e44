"""Irreducible corepresentations ``W^M`` of SU_q(2).

Two layers live here.  The index layer (``lambda_k``, ``c_k``, ``e_action``, ``nu``,
``a_matrices``) is closed-form and cheap for any ``M``.  The PBW layer realizes
``W^M`` inside the algebra for small ``M``: the matrix is read off the coproduct of
the monomials ``x_k = alpha^{m+k} (gamma*)^{m-k}`` and then conjugated by a diagonal
matrix so that the three infinitesimal generators act on it by exactly the index
layer's matrices.  That scaling is computed, not assumed, and the left-over
generator (``A_2``, ``A_3``) agreement is what the tests check.

Half-integers are stored doubled: ``k2 = 2k``, ``p2 = 2p``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import qalg
from .qalg import AlgElement, QContext

__all__ = [
    "WIndex",
    "a_matrices",
    "build_w_pbw",
    "c_k",
    "chi_functional",
    "e_action",
    "entry_norm",
    "entry_norms",
    "f_functional",
    "lambda_k",
    "multiply_by_generator",
    "multiply_w",
    "nu",
    "q_gram",
    "star_coefficient",
    "star_sign",
    "weights",
]

EPS = {1: 1, 2: 2, 3: 1}


class WIndex(NamedTuple):
    """Matrix coefficient ``W^M_{pk}`` with doubled weights."""

    M: int
    p2: int
    k2: int

    def valid(self) -> bool:
        return in_range(self.M, self.p2) and in_range(self.M, self.k2)


def in_range(M: int, j2: int) -> bool:
    return M >= 1 and abs(j2) <= M - 1 and (j2 - (M - 1)) % 2 == 0


def weights(M: int) -> list[int]:
    """Doubled weights ``-2m, -2m + 2, ..., 2m``."""
    return list(range(-(M - 1), M, 2))


def lambda_k(q, k2: int):
    """Diagonal weight; exact when ``q`` is a ``Fraction``."""
    return q * q / (1 - q * q) * (q ** (-2 * k2) - 1)


def c_k(q: float, M: int, k2: int) -> float:
    """Off-diagonal weight; zero at the overflow indices ``k = +-(m+1)``."""
    if abs(k2) > M + 1 or (k2 - (M - 1)) % 2:
        raise ValueError(f"index k2={k2} outside the extended range for M={M}")
    if abs(k2) == M + 1:
        return 0.0
    m2 = M - 1
    # (q^{-2k} - q^{2m}) (q^{-2m} - q^{-2(k-1)}) with doubled indices
    rad = (q ** (-k2) - q ** m2) * (q ** (-m2) - q ** (-(k2 - 2)))
    return q / (1.0 - q * q) * math.sqrt(max(rad, 0.0))


def c_k_squared(q, M: int, k2: int):
    """``c_k**2`` as a rational function of ``q``; exact when ``q`` is a ``Fraction``."""
    if abs(k2) > M + 1 or (k2 - (M - 1)) % 2:
        raise ValueError(f"index k2={k2} outside the extended range for M={M}")
    if abs(k2) == M + 1:
        return q * 0
    m2 = M - 1
    return (q / (1 - q * q)) ** 2 * (q ** (-k2) - q**m2) * (q ** (-m2) - q ** (-(k2 - 2)))


def e_action(q: float, r: int, w: WIndex) -> tuple[float, WIndex | None]:
    """Infinitesimal action ``E_r(W^M_{pk}) = coefficient * target``."""
    M, p2, k2 = w
    if r == 1:
        coef, target = -c_k(q, M, k2 + 2), WIndex(M, p2, k2 + 2)
    elif r == 2:
        coef, target = lambda_k(q, k2), w
    elif r == 3:
        coef, target = q * c_k(q, M, k2), WIndex(M, p2, k2 - 2)
    else:
        raise ValueError(f"r must be 1, 2 or 3, got {r}")
    if not in_range(M, target.k2) or coef == 0.0:
        return 0.0, None
    return coef, target


def nu(q: float, M: int, k2: int) -> float:
    return c_k(q, M, k2 + 2) ** 2 + lambda_k(q, k2) ** 2 + q * q * c_k(q, M, k2) ** 2


def a_matrices(q: float, M: int) -> dict[int, np.ndarray]:
    """``A_r`` in the basis ``xi_{-m}, ..., xi_m``; column ``j`` is ``A_r xi_j``."""
    ks = weights(M)
    out = {r: np.zeros((M, M)) for r in (1, 2, 3)}
    for j, k2 in enumerate(ks):
        for r in (1, 2, 3):
            coef, target = e_action(q, r, WIndex(M, 0 if M % 2 else 1, k2))
            if target is not None:
                out[r][ks.index(target.k2), j] = coef
    return out


INVOLUTIONS = ("twisted", "plain")


def _check_involution(involution: str) -> None:
    if involution not in INVOLUTIONS:
        raise ValueError(f"involution must be one of {INVOLUTIONS}, got {involution!r}")


def chi_star_matrices(q: float, M: int, involution: str = "twisted") -> dict[int, np.ndarray]:
    """Values of the adjoint functionals ``chi_r*`` on ``W^M``.

    With the twisted coefficient involution ``chi_1* = -chi_3/q`` and
    ``chi_3* = -q chi_1``.  With the plain one the powers of ``q`` swap:
    ``chi_1* = -q chi_3`` and ``chi_3* = -chi_1/q``.  In both cases ``chi_2* = chi_2``.
    """
    _check_involution(involution)
    a = a_matrices(q, M)
    if involution == "twisted":
        return {1: -a[3] / q, 2: a[2].copy(), 3: -q * a[1]}
    return {1: -q * a[3], 2: a[2].copy(), 3: -a[1] / q}


def entry_norm(q: float, M: int, p2: int, k2: int, involution: str = "twisted") -> float:
    """Closed form of ``h(W_{pk}^dagger W_{pk})`` for the chosen involution.

    Twisted: ``q^{2p + 2m} (1 - q^2) / (1 - q^{2M})``, independent of ``k``.
    Plain: the same with ``p`` replaced by ``k``.
    """
    _check_involution(involution)
    j2 = p2 if involution == "twisted" else k2
    return q ** (j2 + M - 1) * (1.0 - q * q) / (1.0 - q ** (2 * M))


def star_sign(q: float, w: WIndex, involution: str = "twisted") -> float:
    """Closed form of the coefficient in ``(W_{pk})^dagger = s W_{-p,-k}``."""
    _check_involution(involution)
    base = -1.0 / q if involution == "twisted" else -q
    return base ** ((w.k2 - w.p2) // 2)


# --- functionals on PBW monomials -------------------------------------------------

_GEN_OF = {(1, 0): "alpha", (-1, 0): "alpha*", (0, 1): "gamma", (0, -1): "gamma*"}


def _word(m: qalg.Mono) -> list[str]:
    k, l, n = m
    word = ["alpha" if k > 0 else "alpha*"] * abs(k)
    word += ["gamma" if l > 0 else "gamma*"] * abs(l)
    word += ["gamma*", "gamma"] * n
    return word


def f_functional(ctx: QContext, r: int, exact: bool = False):
    """The character ``f_r`` with ``eta_r b = (f_r * b) eta_r``, as a function on monomials."""
    q = ctx.qval(exact)

    def f(m: qalg.Mono):
        k, l, n = m
        if l or n:
            return 0
        return q ** (-EPS[r] * k)

    return f


def _chi_generators(ctx: QContext, r: int, exact: bool) -> dict[str, object]:
    """``chi_r`` on the generators, read off ``A_r`` for ``M = 2`` and ``W^2``."""
    q = ctx.qval(exact)
    one = Fraction(1) if exact else 1.0
    zero = 0 * one
    vals = {g: zero for g in ("alpha", "alpha*", "gamma", "gamma*")}
    if r == 1:
        vals["gamma*"] = -one  # A_1 at (1/2, -1/2) is -c_{1/2} = -1
    elif r == 2:
        vals["alpha"] = one  # lambda_{1/2}
        vals["alpha*"] = -q * q  # lambda_{-1/2}
    elif r == 3:
        vals["gamma"] = -one  # A_3 at (-1/2, 1/2) is q c_{1/2} = q, entry -q gamma
    return vals


def chi_functional(ctx: QContext, r: int, exact: bool = False):
    """``chi_r`` on monomials via ``chi(ab) = eps(a) chi(b) + chi(a) f_r(b)``."""
    gens = _chi_generators(ctx, r, exact)
    q = ctx.qval(exact)
    eps_gen = {"alpha": 1, "alpha*": 1, "gamma": 0, "gamma*": 0}
    f_gen = {"alpha": q ** (-EPS[r]), "alpha*": q ** EPS[r], "gamma": 0, "gamma*": 0}

    def chi(m: qalg.Mono):
        word = _word(m)
        total = 0
        prefix = 1
        for i, g in enumerate(word):
            if prefix == 0:
                break
            suffix = 1
            for h in word[i + 1:]:
                suffix *= f_gen[h]
            total += prefix * gens[g] * suffix
            prefix *= eps_gen[g]
        return total

    return chi


def evaluate(func, a: AlgElement):
    return sum((c * func(m) for m, c in a.terms.items()), 0)


# --- PBW realization --------------------------------------------------------------

def _x_mono(M: int, k2: int) -> qalg.Mono:
    # x_k = alpha^{m+k} (gamma*)^{m-k}
    return ((M - 1 + k2) // 2, -((M - 1 - k2) // 2), 0)


_RAW: dict[tuple[QContext, int], list[list[AlgElement]]] = {}
_SCALE: dict[tuple[QContext, int], np.ndarray] = {}


def _read_columns(ctx: QContext, M: int, tensor: qalg.TensorElement, k2: int, column: dict) -> None:
    xs = {_x_mono(M, j2): j2 for j2 in weights(M)}
    for key in {t[:3] for t in tensor.terms}:
        if key not in xs:
            raise RuntimeError(f"coproduct of x_k for M={M} has a stray left factor {key}")
    for mono, j2 in xs.items():
        column[(j2, k2)] = tensor.left_component(mono)


def w_raw(ctx: QContext, M: int) -> list[list[AlgElement]]:
    """Exact ``W^M`` in the basis ``x_k``.

    The first column comes from expanding ``Delta(gamma*)^{2m}``; column ``k`` is
    ``Delta(alpha)`` times the column ``k - 1/2`` of ``W^{M-1}``, since
    ``alpha x^{m-1/2}_{k-1/2} = x^m_k``.
    """
    key = (ctx, M)
    if key in _RAW:
        return _RAW[key]
    if M < 1:
        raise ValueError("M must be positive")
    ks = weights(M)
    entries: dict[tuple[int, int], AlgElement] = {}
    if M == 1:
        entries[(0, 0)] = AlgElement.scalar(ctx, 1, exact=True)
    else:
        step = qalg.comultiply(qalg.generator(ctx, "gamma*", exact=True))
        base = step
        for _ in range(M - 2):
            base = base * step
        _read_columns(ctx, M, base, ks[0], entries)
        prev = w_raw(ctx, M - 1)
        prev_ks = weights(M - 1)
        d_alpha = qalg.comultiply(qalg.generator(ctx, "alpha", exact=True))
        for k2 in ks[1:]:
            col = prev_ks.index(k2 - 1)
            pairs = [
                (AlgElement(ctx, {_x_mono(M - 1, i2): 1}, exact=True), prev[i][col])
                for i, i2 in enumerate(prev_ks)
            ]
            _read_columns(ctx, M, d_alpha * qalg.TensorElement.from_pairs(ctx, pairs), k2, entries)
    mat = [[entries[(p2, k2)] for k2 in ks] for p2 in ks]
    _RAW[key] = mat
    return mat


def w_scale(ctx: QContext, M: int) -> np.ndarray:
    """Diagonal ``s`` such that ``s_k / s_p * raw_{pk}`` carries the index-layer action.

    Fixed by requiring ``chi_1`` on the rescaled matrix to equal ``A_1``.
    """
    key = (ctx, M)
    if key in _SCALE:
        return _SCALE[key]
    raw = w_raw(ctx, M)
    ks = weights(M)
    chi1 = chi_functional(ctx, 1, exact=True)
    s = np.ones(M)
    for j in range(M - 1):
        # chi_1(raw)_{j+1, j} scaled by s_j / s_{j+1} must equal -c_{k_j + 1}
        a = float(evaluate(chi1, raw[j + 1][j]))
        target = -c_k(ctx.q, M, ks[j] + 2)
        if a == 0.0 or target == 0.0:
            raise RuntimeError(f"chi_1 does not connect weights {ks[j]} and {ks[j + 1]} for M={M}")
        s[j + 1] = s[j] * a / target
    _SCALE[key] = s
    return s


def build_w_pbw(ctx: QContext, M: int) -> list[list[AlgElement]]:
    """``W^M`` as float PBW elements in the basis where ``chi_r(W^M) = A_r``."""
    raw = w_raw(ctx, M)
    s = w_scale(ctx, M)
    return [[raw[i][j].to_float().scale(s[j] / s[i]) for j in range(M)] for i in range(M)]


def functional_matrix(ctx: QContext, func, M: int, exact_func: bool = True) -> np.ndarray:
    """``func(W^M)`` for a functional on monomials, in the rescaled basis."""
    raw = w_raw(ctx, M)
    s = w_scale(ctx, M)
    out = np.zeros((M, M))
    for i in range(M):
        for j in range(M):
            out[i, j] = float(evaluate(func, raw[i][j])) * s[j] / s[i]
    return out


def _raw_inner(ctx: QContext, a: AlgElement, b: AlgElement, involution: str = "plain") -> Fraction:
    conj = qalg.twisted_star if involution == "twisted" else qalg.star
    return qalg.haar(qalg.multiply(conj(b), a))


def entry_norms(ctx: QContext, M: int, involution: str = "plain") -> np.ndarray:
    """``h((W^M_{pk})^dagger W^M_{pk})`` indexed ``[p, k]``, computed in the PBW basis."""
    _check_involution(involution)
    raw = w_raw(ctx, M)
    s = w_scale(ctx, M)
    out = np.zeros((M, M))
    for i in range(M):
        for j in range(M):
            out[i, j] = float(_raw_inner(ctx, raw[i][j], raw[i][j], involution)) * (s[j] / s[i]) ** 2
    return out


def entry_gram(ctx: QContext, M: int, N: int | None = None, involution: str = "plain") -> np.ndarray:
    """Full Haar Gram between entries of ``W^M`` and ``W^N``, flattened row-major.

    ``G[(p, j), (p', k)] = h((W^N_{p'k})^dagger W^M_{pj})``.
    """
    _check_involution(involution)
    N = M if N is None else N
    ra, rb = w_raw(ctx, M), w_raw(ctx, N)
    sa, sb = w_scale(ctx, M), w_scale(ctx, N)
    out = np.zeros((M * M, N * N))
    for i in range(M):
        for j in range(M):
            for p in range(N):
                for k in range(N):
                    val = _raw_inner(ctx, ra[i][j], rb[p][k], involution)
                    out[i * M + j, p * N + k] = float(val) * (sa[j] / sa[i]) * (sb[k] / sb[p])
    return out


def q_gram(ctx: QContext, M: int) -> np.ndarray:
    """``Q_M = h(W^{M*} W^M)``, i.e. ``Q[j, k] = sum_p h((W_{pj})* W_{pk})``."""
    raw = w_raw(ctx, M)
    s = w_scale(ctx, M)
    out = np.zeros((M, M), dtype=complex)
    for j in range(M):
        for k in range(M):
            total = 0.0
            for p in range(M):
                val = _raw_inner(ctx, raw[p][k], raw[p][j])
                total += float(val) * (s[j] / s[p]) * (s[k] / s[p])
            out[j, k] = total
    return out


def star_coefficient(ctx: QContext, w: WIndex, involution: str = "plain") -> float:
    """``kappa`` with ``(W^M_{pk})^dagger = kappa W^M_{-p,-k}``, read off the PBW realization."""
    _check_involution(involution)
    M, p2, k2 = w
    ks = weights(M)
    i, j = ks.index(p2), ks.index(k2)
    raw = w_raw(ctx, M)
    s = w_scale(ctx, M)
    lhs = (qalg.twisted_star if involution == "twisted" else qalg.star)(raw[i][j])
    rhs = raw[M - 1 - i][M - 1 - j]
    mono = next(iter(rhs.terms))
    ratio = lhs.terms.get(mono, 0) / rhs.terms[mono]
    if (lhs - rhs.scale(ratio)).terms:
        raise RuntimeError(f"star of W{tuple(w)} is not proportional to the mirrored entry")
    # rescaled: W~_{pk} = s_k/s_p raw_{pk}
    return float(ratio) * (s[j] / s[i]) / (s[M - 1 - j] / s[M - 1 - i])


_SHIFTS = {"alpha": (1, 1), "gamma": (-1, 1), "alpha*": (-1, -1), "gamma*": (1, -1)}
_MULT_CACHE: dict[tuple[QContext, str, int], dict] = {}


def _solve_two_term(target: AlgElement, basis: list[AlgElement]) -> tuple[list[Fraction], Fraction]:
    """Exact least-squares-free fit of ``target`` by ``basis`` elements; returns residual max."""
    monos = sorted({m for b in basis for m in b.terms} | set(target.terms))
    n = len(basis)
    # Fraction Gaussian elimination on the normal equations restricted to pivots.
    rows = [[b.terms.get(m, Fraction(0)) for b in basis] + [target.terms.get(m, Fraction(0))] for m in monos]
    coeffs: list[Fraction] = [Fraction(0)] * n
    pivots: list[int] = []
    mat = [r[:] for r in rows]
    col_rows: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            raise RuntimeError("product targets are linearly dependent")
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c] / mat[r][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        col_rows.append(r)
        r += 1
    for c, row in zip(pivots, col_rows):
        coeffs[c] = mat[row][n] / mat[row][c]
    fit = sum((b.scale(x) for b, x in zip(basis, coeffs)), AlgElement(target.ctx, {}, exact=True))
    residual = max((abs(v) for v in (target - fit).terms.values()), default=Fraction(0))
    return coeffs, residual


def multiply_by_generator(ctx: QContext, g: str, w: WIndex) -> dict[WIndex, float]:
    """Expand ``g W^M_{jk}`` over ``W^{M-1}`` and ``W^{M+1}`` at the shifted weights."""
    g = qalg._gen_name(g)
    M, j2, k2 = w
    if not w.valid():
        raise ValueError(f"invalid index {w}")
    cache = _MULT_CACHE.setdefault((ctx, g, M), {})
    if (j2, k2) in cache:
        return cache[(j2, k2)]
    dj, dk = _SHIFTS[g]
    tj, tk = j2 + dj, k2 + dk
    targets = [WIndex(N, tj, tk) for N in (M - 1, M + 1) if N >= 1 and in_range(N, tj) and in_range(N, tk)]
    ks = weights(M)
    raw = w_raw(ctx, M)
    prod = qalg.multiply(qalg.generator(ctx, g, exact=True), raw[ks.index(j2)][ks.index(k2)])
    basis = [w_raw(ctx, t.M)[weights(t.M).index(t.p2)][weights(t.M).index(t.k2)] for t in targets]
    coeffs, residual = _solve_two_term(prod, basis)
    if residual != 0:
        raise RuntimeError(f"{g} * W{tuple(w)} is not spanned by its shifted targets")
    s = w_scale(ctx, M)
    scale_src = s[ks.index(k2)] / s[ks.index(j2)]
    out: dict[WIndex, float] = {}
    for t, x in zip(targets, coeffs):
        if x == 0:
            continue
        st = w_scale(ctx, t.M)
        tks = weights(t.M)
        scale_t = st[tks.index(t.k2)] / st[tks.index(t.p2)]
        out[t] = float(x) * scale_src / scale_t
    cache[(j2, k2)] = out
    return out


_PRODUCT_CACHE: dict[tuple[QContext, WIndex, WIndex], dict] = {}


def multiply_w(ctx: QContext, w1: WIndex, w2: WIndex) -> dict[WIndex, float]:
    """Expand ``W^{M1}_{ab} W^{M2}_{cd}`` over the entries ``W^N_{a+c, b+d}``.

    ``N`` runs over ``|M1 - M2| + 1, ..., M1 + M2 - 1`` in steps of two.  The fit is
    exact in the PBW basis and raises if the product leaves that span.
    """
    if not (w1.valid() and w2.valid()):
        raise ValueError(f"invalid indices {w1}, {w2}")
    key = (ctx, w1, w2)
    if key in _PRODUCT_CACHE:
        return _PRODUCT_CACHE[key]
    tp, tk = w1.p2 + w2.p2, w1.k2 + w2.k2
    targets = [
        WIndex(N, tp, tk)
        for N in range(abs(w1.M - w2.M) + 1, w1.M + w2.M, 2)
        if in_range(N, tp) and in_range(N, tk)
    ]
    prod = qalg.multiply(_raw_entry(ctx, w1), _raw_entry(ctx, w2))
    coeffs, residual = _solve_two_term(prod, [_raw_entry(ctx, t) for t in targets])
    if residual != 0:
        raise RuntimeError(f"W{tuple(w1)} W{tuple(w2)} is not spanned by its weight targets")
    src = _entry_scale(ctx, w1) * _entry_scale(ctx, w2)
    out = {t: float(x) * src / _entry_scale(ctx, t) for t, x in zip(targets, coeffs) if x != 0}
    _PRODUCT_CACHE[key] = out
    return out


def _raw_entry(ctx: QContext, w: WIndex) -> AlgElement:
    ks = weights(w.M)
    return w_raw(ctx, w.M)[ks.index(w.p2)][ks.index(w.k2)]


def _entry_scale(ctx: QContext, w: WIndex) -> float:
    ks = weights(w.M)
    s = w_scale(ctx, w.M)
    return float(s[ks.index(w.k2)] / s[ks.index(w.p2)])
