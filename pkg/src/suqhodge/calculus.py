"""The 3D left-covariant calculus on SU_q(2) and its generic form operators.

A form is a finite sum ``sum c W^M_{pk} xi`` with ``xi`` running over the eight
invariant basis forms ``1, e1, e2, e3, e12, e23, e31, tau`` (``e12 = eta_1 eta_2``
and so on, ``tau = eta_1 eta_2 eta_3``).  Coefficients sit on the left.  Every
operator acts on this index data directly: ``d`` through the infinitesimal action
of the three functionals and the Cartan-Maurer table, ``d*`` through the adjoint
functionals and the Gram adjoints of left multiplication on the invariant forms,
``L`` through its invariant table.  Products of two coefficients go through the
PBW realization (:func:`corep.multiply_w`), so the Leibniz rule is tested against
the algebra itself.

The coefficient involution is a parameter.  ``"twisted"`` (the default) is
``a -> tau_{-i}(a*)``; with it the invariant star table
``eta_1* = q eta_3, eta_2* = -eta_2, eta_3* = eta_1 / q`` makes ``d`` a
*-derivation and the adjoint relations ``chi_1* = -chi_3 / q``,
``chi_3* = -q chi_1`` hold for ``<a|b> = h(b^dagger a)``.  ``"plain"`` is the
C*-involution of SU_q(2); compatibility with ``d`` then forces
``eta_1* = eta_3 / q`` and ``eta_3* = q eta_1`` and the adjoint relations swap
their powers of ``q``.  Both variants build their Hodge operator from the same
pairing and rebalancing procedure.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import corep, qalg
from .corep import WIndex, e_action, in_range

__all__ = [
    "BASIS",
    "GRADE",
    "Calculus",
    "Form",
    "InvariantExterior",
    "block_keys",
    "build_hodge_from_pairing",
    "codifferential",
    "differential",
    "form_inner",
    "get_calculus",
    "group_beta",
    "hodge",
    "integral",
    "operator_matrix",
    "random_form",
    "rebalance_inner_product",
    "star",
    "twist",
    "wedge",
]

BASIS: tuple[str, ...] = ("1", "e1", "e2", "e3", "e12", "e23", "e31", "tau")
GRADE: dict[str, int] = {"1": 0, "e1": 1, "e2": 1, "e3": 1, "e12": 2, "e23": 2, "e31": 2, "tau": 3}
ETA: dict[int, str] = {1: "e1", 2: "e2", 3: "e3"}
_IDX = {b: i for i, b in enumerate(BASIS)}

# ``xi W_{pk} = q^{-2 w k} W_{pk} xi``: additive weights of the commutation rule.
WEIGHT: dict[str, int] = {"1": 0, "e1": 1, "e2": 2, "e3": 1, "e12": 3, "e23": 3, "e31": 2, "tau": 4}
# Block label of ``W_{pj} xi`` is ``j + SHIFT[xi]``.
SHIFT: dict[str, int] = {"1": 0, "e1": -1, "e2": 0, "e3": 1, "e12": -1, "e23": 1, "e31": 0, "tau": 0}
# Twist and one-parameter group on invariant forms: ``sigma(xi) = q^{6 s} xi``,
# ``beta_z(xi) = q^{-6 i z s} xi``.
_SIGMA_POWER: dict[str, int] = {"1": 0, "e1": 1, "e2": 0, "e3": -1, "e12": 1, "e23": -1, "e31": 0, "tau": 0}

Key = tuple[int, int, int, str]  # (M, p2, k2, basis id)


def _product_table(q: float) -> dict[tuple[str, str], tuple[str, float]]:
    t: dict[tuple[str, str], tuple[str, float]] = {}
    for b in BASIS:
        t[("1", b)] = (b, 1.0)
        t[(b, "1")] = (b, 1.0)
    t[("e1", "e2")] = ("e12", 1.0)
    t[("e2", "e1")] = ("e12", -(q**4))
    t[("e2", "e3")] = ("e23", 1.0)
    t[("e3", "e2")] = ("e23", -(q**4))
    t[("e3", "e1")] = ("e31", 1.0)
    t[("e1", "e3")] = ("e31", -(q**-2))
    t[("e1", "e23")] = ("tau", 1.0)
    t[("e2", "e31")] = ("tau", q**6)
    t[("e3", "e12")] = ("tau", q**6)
    t[("e12", "e3")] = ("tau", 1.0)
    t[("e23", "e1")] = ("tau", q**6)
    t[("e31", "e2")] = ("tau", q**6)
    return t


def build_hodge_from_pairing(ext: InvariantExterior, gram: np.ndarray) -> np.ndarray:
    """The Hodge matrix ``L`` with ``int omega* L(omega') = <omega'|omega>``.

    The pairing ``P[i, j]`` is the ``tau`` coefficient of ``(b_i)* b_j`` for basis
    forms of complementary grades; then ``P L = G`` grade by grade.  Column ``j``
    of the result is ``L(b_j)``.
    """
    pair = ext.pairing_matrix()
    out = np.zeros((8, 8), dtype=complex)
    for k in range(4):
        src = [i for i, b in enumerate(BASIS) if GRADE[b] == k]
        dst = [i for i, b in enumerate(BASIS) if GRADE[b] == 3 - k]
        P = pair[np.ix_(src, dst)]
        if abs(np.linalg.det(P)) < 1e-300:
            raise np.linalg.LinAlgError(f"degenerate pairing between grades {k} and {3 - k}")
        # <b_a|b_i> = G[i, a]; sum_j P[i, j] L[j, a] = G[i, a]
        out[np.ix_(dst, src)] = np.linalg.solve(P, gram[np.ix_(src, src)])
    return out


def rebalance_inner_product(gram: np.ndarray, hodge_old: np.ndarray, n: int = 3) -> np.ndarray:
    """Redefine the Gram above the middle grade as the pull-back through ``L'``.

    Grades ``k < n/2`` keep their inner product; for ``k > n/2`` the new product of
    two forms is the old product of their ``L'`` pre-images.  Only odd ``n`` is
    supported.
    """
    if n % 2 == 0:
        raise ValueError("rebalancing is implemented for odd dimension only")
    new = gram.astype(complex).copy()
    for k in range(n // 2 + 1, n + 1):
        dst = [i for i, b in enumerate(BASIS) if GRADE[b] == k]
        src = [i for i, b in enumerate(BASIS) if GRADE[b] == n - k]
        Lk = hodge_old[np.ix_(dst, src)]
        inv = np.linalg.inv(Lk)
        new[np.ix_(dst, dst)] = inv.conj().T @ gram[np.ix_(src, src)] @ inv
    return new


@dataclass(frozen=True)
class InvariantExterior:
    """Multiplication, star, Gram and Hodge tables on the eight invariant forms."""

    q: float
    involution: str = "twisted"

    def __post_init__(self) -> None:
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if self.involution not in corep.INVOLUTIONS:
            raise ValueError(f"unknown involution {self.involution!r}")

    @cached_property
    def products(self) -> dict[tuple[str, str], tuple[str, float]]:
        return _product_table(self.q)

    def product(self, a: str, b: str) -> tuple[str, float] | None:
        return self.products.get((a, b))

    @cached_property
    def star_table(self) -> dict[str, tuple[str, float]]:
        q = self.q
        s1 = q if self.involution == "twisted" else 1.0 / q
        t: dict[str, tuple[str, float]] = {"1": ("1", 1.0), "e1": ("e3", s1), "e2": ("e2", -1.0), "e3": ("e1", 1.0 / s1)}
        # (ab)* = (-1)^{kl} b* a* on the defining products
        for a, b, ab in (("e1", "e2", "e12"), ("e2", "e3", "e23"), ("e3", "e1", "e31"), ("e1", "e23", "tau")):
            (bs, cb), (as_, ca) = t[b], t[a]
            prod = self.product(bs, as_)
            assert prod is not None
            sign = (-1) ** (GRADE[a] * GRADE[b])
            t[ab] = (prod[0], sign * cb * ca * prod[1])
        return t

    @cached_property
    def partial(self) -> np.ndarray:
        """Cartan-Maurer differential on invariant forms; column ``j`` is ``d b_j``."""
        q = self.q
        D = np.zeros((8, 8))
        D[_IDX["e12"], _IDX["e1"]] = q**2 * (1 + q**2)
        D[_IDX["e31"], _IDX["e2"]] = -1.0 / q
        D[_IDX["e23"], _IDX["e3"]] = q**2 * (1 + q**2)
        return D

    def left_mult(self, a: str) -> np.ndarray:
        """Matrix of ``b -> a b``."""
        m = np.zeros((8, 8))
        for b in BASIS:
            p = self.product(a, b)
            if p is not None:
                m[_IDX[p[0]], _IDX[b]] += p[1]
        return m

    def right_mult(self, a: str) -> np.ndarray:
        """Matrix of ``b -> b a``."""
        m = np.zeros((8, 8))
        for b in BASIS:
            p = self.product(b, a)
            if p is not None:
                m[_IDX[p[0]], _IDX[b]] += p[1]
        return m

    def pairing_matrix(self) -> np.ndarray:
        """``P[i, j]``: coefficient of ``tau`` in ``(b_i)* b_j``."""
        P = np.zeros((8, 8), dtype=complex)
        for i, a in enumerate(BASIS):
            sa, ca = self.star_table[a]
            for j, b in enumerate(BASIS):
                p = self.product(sa, b)
                if p is not None and p[0] == "tau":
                    P[i, j] = np.conj(ca) * p[1]
        return P

    @cached_property
    def initial_gram(self) -> np.ndarray:
        """All eight basis forms orthonormal."""
        return np.eye(8, dtype=complex)

    @cached_property
    def initial_hodge(self) -> np.ndarray:
        return build_hodge_from_pairing(self, self.initial_gram)

    @cached_property
    def gram(self) -> np.ndarray:
        return rebalance_inner_product(self.initial_gram, self.initial_hodge)

    @cached_property
    def hodge(self) -> np.ndarray:
        return build_hodge_from_pairing(self, self.gram)

    @cached_property
    def hodge_table(self) -> dict[str, tuple[str, complex]]:
        out = {}
        for j, b in enumerate(BASIS):
            col = self.hodge[:, j]
            (i,) = np.flatnonzero(np.abs(col) > 1e-300)
            out[b] = (BASIS[i], complex(col[i]))
        return out

    def adjoint(self, A: np.ndarray) -> np.ndarray:
        """Gram adjoint ``G^{-1} A^H G``."""
        G = self.gram
        return np.linalg.solve(G, A.conj().T @ G)

    @cached_property
    def left_mult_adjoints(self) -> dict[int, np.ndarray]:
        return {r: self.adjoint(self.left_mult(ETA[r])) for r in (1, 2, 3)}

    @cached_property
    def partial_adjoint(self) -> np.ndarray:
        return self.adjoint(self.partial)


# --- forms ----------------------------------------------------------------------


@dataclass(frozen=True)
class Calculus:
    """Parameters shared by every form: ``q``, the coefficient involution, pruning."""

    q: float = 0.5
    involution: str = "twisted"
    tol: float = 1e-13
    max_M: int = 12

    @cached_property
    def ext(self) -> InvariantExterior:
        return InvariantExterior(self.q, self.involution)

    @cached_property
    def ctx(self) -> qalg.QContext:
        return qalg.default_context(self.q)

    def entry_norm(self, w: WIndex) -> float:
        return corep.entry_norm(self.q, w.M, w.p2, w.k2, self.involution)

    def chi_star_action(self, r: int, w: WIndex) -> tuple[float, WIndex | None]:
        """``E_{chi_r*}(W_{pk}) = coefficient * target``."""
        q = self.q
        if r == 2:
            return e_action(q, 2, w)
        if self.involution == "twisted":
            scale, src = (-1.0 / q, 3) if r == 1 else (-q, 1)
        else:
            scale, src = (-q, 3) if r == 1 else (-1.0 / q, 1)
        coef, target = e_action(q, src, w)
        return scale * coef, target


@lru_cache(maxsize=None)
def get_calculus(q: float = 0.5, involution: str = "twisted") -> Calculus:
    return Calculus(q, involution)


@dataclass
class Form:
    """Sparse form ``sum c W^M_{pk} xi`` keyed by ``(M, p2, k2, xi)``."""

    calc: Calculus
    terms: dict[Key, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cut = self.calc.tol * max((abs(c) for c in self.terms.values()), default=0.0)
        self.terms = {k: complex(c) for k, c in self.terms.items() if abs(c) > cut}
        for M, p2, k2, b in self.terms:
            if b not in _IDX or not WIndex(M, p2, k2).valid():
                raise ValueError(f"invalid form key {(M, p2, k2, b)}")

    @classmethod
    def basis(cls, calc: Calculus, w: WIndex, b: str, coef: complex = 1.0) -> Form:
        return cls(calc, {(w.M, w.p2, w.k2, b): coef})

    @classmethod
    def one(cls, calc: Calculus) -> Form:
        return cls.basis(calc, WIndex(1, 0, 0), "1")

    def _new(self, terms: Mapping[Key, complex]) -> Form:
        return Form(self.calc, dict(terms))

    def __add__(self, other: Form) -> Form:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self._new(out)

    def __sub__(self, other: Form) -> Form:
        return self + other.scale(-1.0)

    def __neg__(self) -> Form:
        return self.scale(-1.0)

    def scale(self, s: complex) -> Form:
        return self._new({k: c * s for k, c in self.terms.items()})

    __rmul__ = scale

    def grades(self) -> set[int]:
        return {GRADE[k[3]] for k in self.terms}

    def grade(self) -> int:
        g = self.grades()
        if len(g) != 1:
            raise ValueError(f"form is not homogeneous: grades {sorted(g)}")
        return g.pop()

    def norm_inf(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def max_M(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g}) W{k[:3]} {k[3]}" for k, c in sorted(self.terms.items()))
        return f"Form({body or '0'})"


def _accumulate(out: dict, key: Key, c: complex) -> None:
    out[key] = out.get(key, 0) + c


def _linear(fn: Callable[[Calculus, WIndex, str], Iterable[tuple[Key, complex]]]) -> Callable[[Form], Form]:
    def apply(a: Form) -> Form:
        out: dict[Key, complex] = {}
        for (M, p2, k2, b), c in a.terms.items():
            for key, v in fn(a.calc, WIndex(M, p2, k2), b):
                _accumulate(out, key, c * v)
        return Form(a.calc, out)

    apply.__name__ = fn.__name__.lstrip("_")
    apply.__doc__ = fn.__doc__
    return apply


def _columns(mat: np.ndarray, b: str) -> Iterable[tuple[str, complex]]:
    col = mat[:, _IDX[b]]
    for i in np.flatnonzero(col):
        yield BASIS[i], col[i]


@_linear
def _differential(calc: Calculus, w: WIndex, b: str):
    """``d(W xi) = sum_r E_r(W) eta_r xi + W d(xi)``."""
    ext = calc.ext
    for r in (1, 2, 3):
        coef, target = e_action(calc.q, r, w)
        if target is None:
            continue
        prod = ext.product(ETA[r], b)
        if prod is not None:
            yield (target.M, target.p2, target.k2, prod[0]), coef * prod[1]
    for b2, v in _columns(ext.partial, b):
        yield (w.M, w.p2, w.k2, b2), v


differential = _differential


@_linear
def _codifferential(calc: Calculus, w: WIndex, b: str):
    """``d*(W xi) = sum_r E_{chi_r*}(W) M_r^dagger(xi) + W d^dagger(xi)``."""
    ext = calc.ext
    for r in (1, 2, 3):
        coef, target = calc.chi_star_action(r, w)
        if target is None:
            continue
        for b2, v in _columns(ext.left_mult_adjoints[r], b):
            yield (target.M, target.p2, target.k2, b2), coef * v
    for b2, v in _columns(ext.partial_adjoint, b):
        yield (w.M, w.p2, w.k2, b2), v


codifferential = _codifferential


@_linear
def _hodge(calc: Calculus, w: WIndex, b: str):
    """Left A-linear Hodge operator ``L(W xi) = W L(xi)``."""
    b2, v = calc.ext.hodge_table[b]
    yield (w.M, w.p2, w.k2, b2), v


hodge = _hodge


def hodge_inverse(a: Form) -> Form:
    out: dict[Key, complex] = {}
    inv = {v[0]: (k, v[1]) for k, v in a.calc.ext.hodge_table.items()}
    for (M, p2, k2, b), c in a.terms.items():
        b2, v = inv[b]
        _accumulate(out, (M, p2, k2, b2), c / v)
    return Form(a.calc, out)


@_linear
def _twist(calc: Calculus, w: WIndex, b: str):
    """``sigma(W_{pk} xi) = q^{2p - 6k} q^{6 s(xi)} W_{pk} xi``."""
    yield (w.M, w.p2, w.k2, b), calc.q ** (w.p2 - 3 * w.k2 + 6 * _SIGMA_POWER[b])


twist = _twist


def group_beta(z: complex, a: Form) -> Form:
    """``beta_z(W_{pk} xi) = q^{iz(6k - 2p)} q^{-6iz s(xi)} W_{pk} xi``; ``beta_i`` is the twist."""
    lq = math.log(a.calc.q)
    out = {}
    for (M, p2, k2, b), c in a.terms.items():
        expo = 1j * z * (3 * k2 - p2 - 6 * _SIGMA_POWER[b])
        out[(M, p2, k2, b)] = c * complex(np.exp(expo * lq))
    return Form(a.calc, out)


def star(a: Form) -> Form:
    """``(c W xi)* = conj(c) xi* W^dagger``, brought back to left-coefficient form."""
    calc = a.calc
    q = calc.q
    out: dict[Key, complex] = {}
    for (M, p2, k2, b), c in a.terms.items():
        w = WIndex(M, p2, k2)
        bs, cb = calc.ext.star_table[b]
        sw = corep.star_sign(q, w, calc.involution)
        # xi W_{-p,-k} = q^{-2 w(xi) (-k)} W_{-p,-k} xi
        comm = q ** (WEIGHT[bs] * k2)
        _accumulate(out, (M, -p2, -k2, bs), np.conj(c) * cb * sw * comm)
    return Form(calc, out)


def _multiply_entries(calc: Calculus, w1: WIndex, w2: WIndex) -> dict[WIndex, float]:
    if w1.M == 1:
        return {w2: 1.0}
    if w2.M == 1:
        return {w1: 1.0}
    return corep.multiply_w(calc.ctx, w1, w2)


def wedge(a: Form, b: Form) -> Form:
    """Product of forms: ``(W xi)(W' zeta) = q^{-2 w(xi) k'} (W W')(xi zeta)``.

    Coefficient products run through the PBW realization.  A product that reaches
    beyond the calculus truncation ``max_M`` raises instead of being cut off.
    """
    if a.calc != b.calc:
        raise ValueError("forms belong to different calculi")
    calc = a.calc
    q = calc.q
    out: dict[Key, complex] = {}
    for (M1, p1, k1, x), c1 in a.terms.items():
        for (M2, p2, k2, y), c2 in b.terms.items():
            prod = calc.ext.product(x, y)
            if prod is None:
                continue
            comm = q ** (-WEIGHT[x] * k2)
            for w, v in _multiply_entries(calc, WIndex(M1, p1, k1), WIndex(M2, p2, k2)).items():
                if w.M > calc.max_M:
                    raise ValueError(f"product reaches W^{w.M}, beyond the truncation max_M={calc.max_M}")
                _accumulate(out, (w.M, w.p2, w.k2, prod[0]), c1 * c2 * comm * v * prod[1])
    return Form(calc, out)


def integral(a: Form) -> complex:
    """``int(a tau) = h(a)`` and zero below the top grade; ``h(W^M_{pk}) = delta_{M,1}``."""
    return complex(sum(c for (M, _, _, b), c in a.terms.items() if b == "tau" and M == 1))


def form_inner(a: Form, b: Form) -> complex:
    """``<a|b>``: orthogonal coefficient entries weighted by their Haar norms times the
    invariant Gram, linear in ``a``."""
    calc = a.calc
    G = calc.ext.gram
    total = 0j
    for (M, p2, k2, x), c in a.terms.items():
        w = WIndex(M, p2, k2)
        for y in BASIS:
            g = G[_IDX[y], _IDX[x]]
            if g == 0:
                continue
            d = b.terms.get((M, p2, k2, y))
            if d is not None:
                total += calc.entry_norm(w) * np.conj(d) * c * g
    return complex(total)


# --- block helpers ----------------------------------------------------------------


def block_keys(M: int, p2: int, k2: int, grades: Iterable[int] = (0, 1, 2, 3)) -> list[Key]:
    """Basis of ``E(M, p, k)``: ``W_{p, k - shift(xi)} xi`` for the admissible ``xi``."""
    keys = []
    wanted = set(grades)
    for b in BASIS:
        if GRADE[b] not in wanted:
            continue
        j2 = k2 - 2 * SHIFT[b]
        if in_range(M, p2) and in_range(M, j2):
            keys.append((M, p2, j2, b))
    return keys


def operator_matrix(calc: Calculus, op: Callable[[Form], Form], domain: list[Key], codomain: list[Key]) -> np.ndarray:
    """Matrix of a linear form operator; raises if the image leaves ``codomain``."""
    index = {k: i for i, k in enumerate(codomain)}
    mat = np.zeros((len(codomain), len(domain)), dtype=complex)
    for j, key in enumerate(domain):
        image = op(Form(calc, {key: 1.0}))
        for k, c in image.terms.items():
            if k not in index:
                raise ValueError(f"image term {k} of {key} lies outside the codomain")
            mat[index[k], j] = c
    return mat


def gram_matrix(calc: Calculus, keys: list[Key]) -> np.ndarray:
    n = len(keys)
    G = np.zeros((n, n), dtype=complex)
    for i, ki in enumerate(keys):
        for j, kj in enumerate(keys):
            G[i, j] = form_inner(Form(calc, {kj: 1.0}), Form(calc, {ki: 1.0}))
    return G


def random_form(calc: Calculus, rng: np.random.Generator, grade: int | None = None, max_M: int = 4, n_terms: int = 4) -> Form:
    """Seeded random form with complex coefficients, ``M <= max_M``."""
    ids = [b for b in BASIS if grade is None or GRADE[b] == grade]
    terms: dict[Key, complex] = {}
    for _ in range(n_terms):
        M = int(rng.integers(1, max_M + 1))
        ws = corep.weights(M)
        p2, k2 = int(rng.choice(ws)), int(rng.choice(ws))
        b = ids[int(rng.integers(len(ids)))]
        c = complex(rng.normal(), rng.normal())
        _accumulate(terms, (M, p2, k2, b), c)
    return Form(calc, terms)
