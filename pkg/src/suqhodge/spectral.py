"""Block spectra of the Hodge Laplacian of the 3D calculus.

``Omega`` splits into the finite blocks ``E(M, p, k)`` spanned by ``W^M_{pk}``,
``W_{p,k+1} eta_1, W_{pk} eta_2, W_{p,k-1} eta_3``, their Hodge images and
``W_{pk} tau``.  Both ``d`` and ``d*`` preserve these blocks, so every spectral
question is a small dense eigenproblem.  Two independent routes are provided:

* closed forms (``t_block``, ``eigen_closed_form``) in terms of ``lambda_k``,
  ``c_k``, ``nu_k`` and the roots ``mu_k``;
* brute force (``laplacian_block_bruteforce``), which applies the form operators of
  :mod:`suqhodge.calculus` to basis forms and diagonalizes ``d d* + d* d``.

The block Gram is diagonal (orthogonal coefficient entries times the diagonal
invariant Gram), so every operator is symmetrized by the square root of that
diagonal before an eigensolve.  Eigenvalues are computed in that orthonormal
frame after a further diagonal balancing; see :func:`_sym_eigvals`.
"""

from __future__ import annotations

import math
from functools import lru_cache
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import calculus as cal
from . import corep
from .calculus import BASIS, GRADE, Calculus, Form, Key
from .corep import WIndex, c_k, in_range, lambda_k, nu, weights

__all__ = [
    "BoundConstants",
    "SpectralReport",
    "block_dims",
    "closed_form_nonzero_product",
    "commutator_norm",
    "dirac_spectrum",
    "e1_dim",
    "eigen_closed_form",
    "general_block_matrix",
    "general_block_spectrum",
    "group_multiplicities",
    "block_ks",
    "hodge_decomposition_check",
    "laplacian_block_bruteforce",
    "lower_bound_constant",
    "match_spectra",
    "mu_roots",
    "resolvent_norm",
    "t_block",
    "verify_estimate",
]


def block_ks(M: int) -> list[int]:
    """Doubled block labels ``k = -m-1, ..., m+1``."""
    return list(range(-(M + 1), M + 2, 2))


def e1_members(M: int, k2: int) -> list[int]:
    """Which of ``f1, f2, f3`` exist in ``E_1(M, p, k)`` (as 0, 1, 2)."""
    out = []
    for i, j2 in enumerate((k2 + 2, k2, k2 - 2)):
        if in_range(M, j2):
            out.append(i)
    return out


def e1_dim(M: int, k2: int) -> int:
    return len(e1_members(M, k2))


def block_dims(M: int, k2: int) -> dict[int, int]:
    """Dimensions of ``E_0..E_3`` in ``E(M, p, k)``."""
    d0 = 1 if in_range(M, k2) else 0
    d1 = e1_dim(M, k2)
    return {0: d0, 1: d1, 2: d1, 3: d0}


# --- closed forms ---------------------------------------------------------------


def _c_or_zero(q: float, M: int, k2: int) -> float:
    return c_k(q, M, k2) if abs(k2) <= M + 1 else 0.0


def t_block(q: float, M: int, k2: int) -> np.ndarray:
    """Matrix of ``L d`` on ``E_1(M, p, k)`` in the ``(f1, f2, f3)`` coordinates."""
    lam = lambda_k(q, k2)
    c1 = _c_or_zero(q, M, k2 + 2)
    c0 = _c_or_zero(q, M, k2)
    full = np.array(
        [
            [-(q**7) * lam, -(q**7) * c1, 0.0],
            [-(q**7) * c1, q**5, -(q**4) * c0],
            [0.0, -(q**4) * c0, q**3 * lam],
        ]
    )
    keep = e1_members(M, k2)
    return full[np.ix_(keep, keep)]


def b_coeff(q: float, k2: int) -> float:
    return (q**3 - q**7) * lambda_k(q, k2) + q**5


def c_coeff(q: float, M: int, k2: int) -> float:
    return -(q**10) * nu(q, M, k2)


def mu_roots(q: float, M: int, k2: int) -> tuple[float, float]:
    """``mu_k^+-``: the roots of ``x^2 - B_k x + C_k``."""
    B, Cc = b_coeff(q, k2), c_coeff(q, M, k2)
    disc = math.sqrt(B * B - 4.0 * Cc)
    hi = (B + disc) / 2.0 if B >= 0 else (B - disc) / 2.0
    # the smaller root from the product, avoiding cancellation
    lo = Cc / hi
    return (max(hi, lo), min(hi, lo))


def eigen_closed_form(q: float, M: int, k2: int) -> list[float]:
    """Eigenvalues of the Laplacian on ``E_1(M, p, k)``, ascending.

    Three dimensions: ``nu_k`` and ``(mu_k^+-)^2``.  Two (``k = -+m``, ``M > 1``):
    ``nu_k`` with ``(q^5 - q^7 lambda_k)^2`` or ``(q^5 + q^3 lambda_k)^2``.  One:
    ``q^14 lambda_k^2`` at ``k = -m-1``, ``q^6 lambda_k^2`` at ``k = m+1`` and ``q^10``
    for ``M = 1, k = 0``.  Out-of-range labels give an empty list.
    """
    if M < 1 or k2 not in block_ks(M):
        return []
    m2 = M - 1
    dim = e1_dim(M, k2)
    lam = lambda_k(q, k2)
    if dim == 3:
        mp, mm = mu_roots(q, M, k2)
        vals = [nu(q, M, k2), mp * mp, mm * mm]
    elif dim == 2:
        edge = (q**5 - q**7 * lam) ** 2 if k2 == -m2 else (q**5 + q**3 * lam) ** 2
        vals = [nu(q, M, k2), edge]
    elif k2 == -(m2 + 2):
        vals = [q**14 * lam * lam]
    elif k2 == m2 + 2:
        vals = [q**6 * lam * lam]
    else:  # M = 1, k = 0
        vals = [q**10]
    return sorted(vals)


def closed_form_nonzero_product(q: float, M: int, k2: int) -> float:
    """``(mu^+ mu^-)^2``, which must equal ``C_k^2 = q^20 nu_k^2``."""
    mp, mm = mu_roots(q, M, k2)
    return (mp * mm) ** 2


# --- brute force ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _unpruned(q: float, involution: str, max_M: int) -> Calculus:
    return Calculus(q, involution, 0.0, max_M)


def lossless(calc: Calculus) -> Calculus:
    """Same calculus without relative pruning.

    Block matrices span many orders of magnitude; pruning relative to the largest
    coefficient would discard genuine small entries.
    """
    return _unpruned(calc.q, calc.involution, calc.max_M)


def _diag_gram(calc: Calculus, keys: list[Key]) -> np.ndarray:
    """Diagonal of the block Gram: entry norm times the invariant Gram diagonal."""
    g = np.real(np.diag(calc.ext.gram))
    return np.array([calc.entry_norm(WIndex(M, p2, k2)) * g[cal.BASIS.index(b)] for M, p2, k2, b in keys])


def _sym_eigvals(S: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix with strongly graded entries.

    A diagonal balancing (which preserves the spectrum) evens out row norms before
    the dense solve; the result is symmetrized again and solved with LAPACK.
    """
    n = S.shape[0]
    if n == 0:
        return np.zeros(0)
    B, (scale, _) = scipy.linalg.matrix_balance(S, permute=False, separate=True)
    # a balanced Hermitian matrix is Hermitian only up to the diagonal similarity;
    # symmetrize with the geometric mean of the mirrored entries
    H = np.where(np.abs(B) > 0, np.sign(B) * np.sqrt(np.abs(B * B.conj().T)), 0.0)
    if np.abs(S.imag).max(initial=0.0) == 0.0 and np.allclose(B, B.T, rtol=1e-12, atol=0):
        H = B.real
    try:
        vals = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError:  # pragma: no cover - LAPACK failure fallback
        vals = np.linalg.eigvals(S).real
    return np.sort(np.real(vals))


def _laplacian_matrix(calc: Calculus, keys: list[Key]) -> np.ndarray:
    """Matrix of ``d d* + d* d`` on ``keys`` (which must span an invariant block)."""

    def lap(f: Form) -> Form:
        return cal.differential(cal.codifferential(f)) + cal.codifferential(cal.differential(f))

    return cal.operator_matrix(calc, lap, keys, keys)


def _orthonormal(mat: np.ndarray, gram_diag: np.ndarray) -> np.ndarray:
    s = np.sqrt(gram_diag)
    return (mat * s[:, None]) / s[None, :]


def laplacian_block_bruteforce(calc: Calculus, M: int, k2: int, p2: int | None = None, grade: int | None = 1) -> list[float]:
    """Eigenvalues of ``nabla`` on ``E_grade(M, p, k)``, assembled from ``d`` and ``d*``.

    ``grade=None`` returns the whole block ``E(M, p, k)``.  ``p`` defaults to the
    lowest weight; the operators act on the column index only, so every ``p`` gives
    the same spectrum (a property the tests check).
    """
    calc = lossless(calc)
    if M < 1 or k2 not in block_ks(M):
        return []
    p2 = weights(M)[0] if p2 is None else p2
    keys = cal.block_keys(M, p2, k2)
    if not keys:
        return []
    N = _laplacian_matrix(calc, keys)
    S = _orthonormal(N, _diag_gram(calc, keys))
    if grade is not None:
        sel = [i for i, k in enumerate(keys) if GRADE[k[3]] == grade]
        S = S[np.ix_(sel, sel)]
    return [float(v) for v in _sym_eigvals(S)]


def match_spectra(a: Iterable[float], b: Iterable[float], rel: float) -> float:
    """Largest relative mismatch between two sorted multisets; ``inf`` on size mismatch."""
    a, b = sorted(a), sorted(b)
    if len(a) != len(b):
        return math.inf
    worst = 0.0
    for x, y in zip(a, b):
        worst = max(worst, abs(x - y) / max(abs(x), abs(y), rel))
    return worst


def group_multiplicities(vals: Iterable[float], rel: float = 1e-6) -> list[tuple[float, int]]:
    """Bucket sorted eigenvalues whose relative gap is below ``rel``."""
    out: list[tuple[float, int]] = []
    for v in sorted(vals):
        if out and abs(v - out[-1][0]) <= rel * max(abs(v), abs(out[-1][0]), 1e-300):
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((v, 1))
    return out


def dirac_spectrum(calc: Calculus, M: int, k2: int, p2: int | None = None) -> list[float]:
    """Signed eigenvalues of ``D = d + d*`` on ``E(M, p, k)``."""
    calc = lossless(calc)
    if M < 1 or k2 not in block_ks(M):
        return []
    p2 = weights(M)[0] if p2 is None else p2
    keys = cal.block_keys(M, p2, k2)

    def dirac(f: Form) -> Form:
        return cal.differential(f) + cal.codifferential(f)

    S = _orthonormal(cal.operator_matrix(calc, dirac, keys, keys), _diag_gram(calc, keys))
    return [float(v) for v in _sym_eigvals(S)]


# --- the block-matrix theorem -------------------------------------------------------


def general_block_matrix(calc: Calculus, M: int, grade: int) -> np.ndarray:
    """Laplacian on ``{W^M_{ij} xi}`` for one fixed row ``i`` as a functional block matrix.

    The coefficient vector runs over the column index ``j``; entry
    ``[(j, xi), (l, zeta)]`` is ``sum_{r,s} (N_rs)_{xi zeta} phi_rs(W^M)_{jl}`` with
    ``phi_rs`` the products ``chi_r chi_s*``, ``chi_r* chi_s`` (and their versions
    with the counit), evaluated through ``(f g)(W) = f(W) g(W)``.  The returned
    matrix is in the orthonormal frame of the invariant Gram; every eigenvalue
    occurs ``M`` times in ``Omega(M)``, once per row.
    """
    q = calc.q
    ext = calc.ext
    ident = np.eye(M)
    chi = {0: ident, **corep.a_matrices(q, M)}
    chi_star = {0: ident, **corep.chi_star_matrices(q, M, calc.involution)}
    d_parts = {0: ext.partial, **{r: ext.left_mult(cal.ETA[r]) for r in (1, 2, 3)}}
    ds_parts = {0: ext.partial_adjoint, **ext.left_mult_adjoints}
    # nabla = d d* + d* d = sum_{r,s} E_{chi_r} E_{chi_s*} (x) X_r Y_s + E_{chi_s*} E_{chi_r} (x) Y_s X_r
    # and E_f E_g acts on coefficient vectors by the matrix of the product functional f g.
    total = np.zeros((8 * M, 8 * M), dtype=complex)
    for r in range(4):
        for s in range(4):
            phi_rs = chi[r] @ chi_star[s]  # (chi_r chi_s*)(W)
            phi_sr = chi_star[s] @ chi[r]  # (chi_s* chi_r)(W)
            total += np.kron(phi_rs, d_parts[r] @ ds_parts[s])
            total += np.kron(phi_sr, ds_parts[s] @ d_parts[r])
    sel = [j * 8 + i for j in range(M) for i, b in enumerate(BASIS) if GRADE[b] == grade]
    block = total[np.ix_(sel, sel)]
    g = np.tile(np.real(np.diag(ext.gram)), M)[sel]
    return _orthonormal(block, g)


def general_block_spectrum(calc: Calculus, M: int, grade: int) -> list[float]:
    return [float(v) for v in _sym_eigvals(general_block_matrix(calc, M, grade))]


# --- estimates --------------------------------------------------------------------


@dataclass(frozen=True)
class BoundConstants:
    """``a(q)``, ``b_1..b_3(q)`` and ``C(q) = min(a, b_1, b_2, b_3)``."""

    q: float
    a: float
    b1: float
    b2: float
    b3: float

    @property
    def b(self) -> float:
        return min(self.b1, self.b2, self.b3)

    @property
    def C(self) -> float:
        return min(self.a, self.b)


def lower_bound_constant(q: float) -> BoundConstants:
    """Constants of the lower-bound theorem for the Laplacian on ``E_1``."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    a = q**4 * (2.0 - q * q) ** -2
    r1 = q**6 * ((1 + q**8) * q**-20 / a + q**-16 / a**2 + 2 * q**-12 / a + 2 * q**-20 / a)
    r2 = q**6 * ((1 + q**8) * q**-24 + q**-24 + 2 * q**-16 + 2 * q**-24)
    r3 = q**6 * (q**-16 / a**2 + 2 * q**-12 + 2 * q**-24)
    return BoundConstants(q, a, 1.0 / r1, 1.0 / r2, 1.0 / r3)


@dataclass
class SpectralReport:
    """Per-block eigenvalues and checks; ``violations`` lists failing blocks."""

    q: float
    method: str
    blocks: dict[tuple[int, int], list[float]] = field(default_factory=dict)
    residual: float = 0.0
    violations: list[dict] = field(default_factory=list)
    constant: float | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_estimate(q: float, M_max: int, method: str = "closed-form", calc: Calculus | None = None) -> SpectralReport:
    """Check ``min eig nabla|E_1(M,p,k) >= C(q) max(q^{-8k}, 1)`` for all ``M <= M_max``.

    For ``M = 1`` the check runs on ``E_1 + E_2`` (the Laplacian vanishes on
    ``E_0 + E_3``); its spectrum there equals that on ``E_1``.
    """
    const = lower_bound_constant(q).C
    report = SpectralReport(q=q, method=method, constant=const)
    if method == "brute-force":
        calc = calc or cal.get_calculus(q)
    for M in range(1, M_max + 1):
        for k2 in block_ks(M):
            if method == "closed-form":
                vals = eigen_closed_form(q, M, k2)
            else:
                assert calc is not None
                vals = laplacian_block_bruteforce(calc, M, k2, grade=1)
                if M == 1:
                    vals = sorted(vals + laplacian_block_bruteforce(calc, M, k2, grade=2))
            if not vals:
                continue
            report.blocks[(M, k2)] = vals
            bound = const * max(q ** (-4 * k2), 1.0)
            margin = min(vals) / bound - 1.0
            if margin < -1e-12:
                report.violations.append({"M": M, "k2": k2, "min_eig": min(vals), "bound": bound, "margin": margin})
    return report


# --- Hodge decomposition ------------------------------------------------------------


@dataclass
class HodgeReport:
    """Hodge decomposition data of ``Omega(M)``, aggregated over its blocks."""

    M: int
    dim: int
    dim_harmonic: int
    rank_d: int
    rank_dstar: int
    orthogonality: float
    kernel_match: bool
    dirac_residual: float
    adjoint_residual: float
    harmonic_keys: list[Key]

    @property
    def ok(self) -> bool:
        return (
            self.dim_harmonic + self.rank_d + self.rank_dstar == self.dim
            and self.orthogonality < 1e-8
            and self.kernel_match
            and self.dirac_residual < 1e-7
            and self.adjoint_residual < 1e-8
        )


def _rank(mat: np.ndarray, rel: float) -> tuple[int, np.ndarray, np.ndarray]:
    """Rank, orthonormal range and orthonormal null space of ``mat``."""
    u, s, vh = np.linalg.svd(mat)
    r = int(np.sum(s > rel * s.max(initial=0.0))) if s.size and s.max() > 0 else 0
    return r, u[:, :r], vh[r:].conj().T


def hodge_decomposition_check(calc: Calculus, M: int, rel: float = 1e-10) -> HodgeReport:
    """Hodge decomposition of the finite block ``Omega(M)`` (all forms with ``W^M`` entries).

    ``Omega(M)`` is the orthogonal sum of the blocks ``E(M, p, k)``, each invariant
    under ``d`` and ``d*``, so every check runs per block in the Gram-orthonormal
    frame, where ``d*`` must be the conjugate transpose of ``d``.  Ranks use a
    threshold relative to the block, which keeps them reliable although the
    blocks differ by many orders of magnitude.  The report gives the dimension
    count, the largest inner product between unit vectors of ``ker nabla``,
    ``im d`` and ``im d*``, whether ``ker nabla`` equals ``ker d`` intersected with
    ``ker d*``, and how well the squared Dirac spectrum reproduces the Laplacian
    spectrum.
    """
    calc = lossless(calc)
    dim = harm = rank_d = rank_ds = 0
    ortho = dirac_res = adj_res = 0.0
    match = True
    harmonic: list[Key] = []
    for p2 in weights(M):
        for k2 in block_ks(M):
            keys = cal.block_keys(M, p2, k2)
            if not keys:
                continue
            g = _diag_gram(calc, keys)
            d = _orthonormal(cal.operator_matrix(calc, cal.differential, keys, keys), g)
            ds = _orthonormal(cal.operator_matrix(calc, cal.codifferential, keys, keys), g)
            scale = max(np.abs(d).max(), np.abs(ds).max(), 1e-300)
            adj_res = max(adj_res, float(np.abs(ds - d.conj().T).max() / scale))
            lap = d @ ds + ds @ d
            lap = (lap + lap.conj().T) / 2
            lap_scale = max(np.abs(lap).max(), 1e-300)
            rd, im_d, _ = _rank(d, rel)
            rds, im_ds, _ = _rank(ds, rel)
            vals, vecs = np.linalg.eigh(lap)
            zero = vals <= rel * lap_scale
            ker_l = vecs[:, zero]
            _, _, ker_both = _rank(np.vstack([d, ds]), rel)
            if ker_l.shape[1] != ker_both.shape[1]:
                match = False
            elif ker_l.shape[1]:
                match &= np.linalg.matrix_rank(np.hstack([ker_l, ker_both]), tol=1e-8) == ker_l.shape[1]
            for A, B in ((ker_l, im_d), (ker_l, im_ds), (im_d, im_ds)):
                if A.size and B.size:
                    ortho = max(ortho, float(np.abs(A.conj().T @ B).max()))
            dirac = d + ds
            sq = np.sort(np.linalg.eigvalsh((dirac + dirac.conj().T) / 2) ** 2)
            dirac_res = max(dirac_res, float(np.abs(sq - np.sort(vals)).max() / lap_scale))
            harmonic += [keys[i] for i in np.flatnonzero(np.abs(ker_l).max(axis=1) > 1e-8)] if ker_l.size else []
            dim += len(keys)
            harm += int(zero.sum())
            rank_d += rd
            rank_ds += rds
    return HodgeReport(M, dim, harm, rank_d, rank_ds, ortho, bool(match), dirac_res, adj_res, harmonic)


# --- commutators with multiplication operators ---------------------------------------------


def _block_keys_all_p(M: int, k2: int) -> list[Key]:
    keys: list[Key] = []
    for p2 in weights(M):
        keys.extend(cal.block_keys(M, p2, k2))
    return keys


def _resolvent_power(calc: Calculus, M: int, k2: int, power: float) -> tuple[list[Key], np.ndarray]:
    """``(1 + nabla)^{-power}`` on ``G(M, k)`` in the orthonormal frame."""
    calc = lossless(calc)
    keys = _block_keys_all_p(M, k2)
    if not keys:
        return keys, np.zeros((0, 0))
    S = _orthonormal(_laplacian_matrix(calc, keys), _diag_gram(calc, keys))
    S = (S + S.conj().T) / 2
    vals, vecs = np.linalg.eigh(S)
    vals = np.maximum(vals, 0.0)
    return keys, (vecs * (1.0 + vals) ** (-power)) @ vecs.conj().T


def resolvent_norm(calc: Calculus, M: int, k2: int) -> float:
    """``||R_(M,k)|| = (1 + min eig nabla_(M,k))^{-1/2}``."""
    keys, R = _resolvent_power(calc, M, k2, 0.5)
    return float(np.linalg.norm(R, 2)) if keys else 0.0


def _differential_of_generator(calc: Calculus, a: str) -> Form:
    q = calc.q
    if a == "alpha":
        gen = Form.basis(calc, WIndex(2, 1, 1), "1")
    elif a == "gamma":
        gen = Form.basis(calc, WIndex(2, -1, 1), "1", -1.0 / q)
    else:
        raise ValueError(f"a must be 'alpha' or 'gamma', got {a!r}")
    return cal.differential(gen)


@dataclass
class CommutatorReport:
    a: str
    beta: float
    delta: float
    suprema: list[float]
    block_norms: dict[tuple[int, int], float]
    resolvent_norms: dict[tuple[int, int], float]
    constant: float
    m1_requirement: float
    adjusted_constant: float
    resolvent_violations: list[tuple[int, int]]
    flagged: bool

    def plateau(self, lag: int = 2) -> float:
        """Relative growth ``(s(T) - s(T - lag)) / s(T)`` at the tail."""
        s = self.suprema
        if len(s) <= lag or s[-1] == 0:
            return math.inf
        return (s[-1] - s[-1 - lag]) / s[-1]


def commutator_norm(calc: Calculus, a: str, beta: float, delta: float, M_max: int) -> CommutatorReport:
    """Norms of ``R^beta [L_a, d] R^delta`` restricted to each block ``G(M, k)``.

    ``[L_a, d] omega = -(da) omega`` maps ``G(M, k)`` into blocks with ``M +- 1``; the
    target blocks carry their own ``R^beta``.  ``s(T)`` is the largest block norm over
    ``M <= T``.  The ``R`` bound ``C(q)^{-1/2} min(q^{2k}, q^{4k})`` is checked with
    ``C(q)`` shrunk just enough to cover ``M = 1`` (where harmonic forms live).
    """
    calc = lossless(calc)
    if beta < 0 or delta < 0:
        raise ValueError("beta and delta must be non-negative")
    if M_max + 1 > calc.max_M:
        raise ValueError(f"M_max={M_max} needs W^{M_max + 1}, beyond max_M={calc.max_M}")
    q = calc.q
    da = _differential_of_generator(calc, a)
    minus_da = da.scale(-1.0)
    cache: dict[tuple[int, int, float], tuple[list[Key], np.ndarray]] = {}

    def res(M: int, k2: int, power: float) -> tuple[list[Key], np.ndarray]:
        key = (M, k2, power)
        if key not in cache:
            cache[key] = _resolvent_power(calc, M, k2, power)
        return cache[key]

    block_norms: dict[tuple[int, int], float] = {}
    for M in range(1, M_max + 1):
        for k2 in block_ks(M):
            dom, Rd = res(M, k2, delta / 2)
            if not dom:
                continue
            images = [cal.wedge(minus_da, Form(calc, {key: 1.0})) for key in dom]
            targets = sorted({_block_label(k) for img in images for k in img.terms})
            cols = []
            for tM, tk in targets:
                tkeys, Rb = res(tM, tk, beta / 2)
                index = {k: i for i, k in enumerate(tkeys)}
                g_t = np.sqrt(_diag_gram(calc, tkeys))
                T = np.zeros((len(tkeys), len(dom)), dtype=complex)
                for j, img in enumerate(images):
                    for k, c in img.terms.items():
                        if _block_label(k) == (tM, tk):
                            T[index[k], j] = c
                cols.append(Rb @ (T * g_t[:, None]))
            g_d = np.sqrt(_diag_gram(calc, dom))
            stacked = np.vstack(cols) / g_d[None, :] if cols else np.zeros((0, len(dom)))
            block_norms[(M, k2)] = float(np.linalg.norm(stacked @ Rd, 2)) if stacked.size else 0.0
    suprema = []
    running = 0.0
    for M in range(1, M_max + 1):
        running = max([running] + [v for (m, _), v in block_norms.items() if m == M])
        suprema.append(running)
    # resolvent norm bound with the M = 1 adjustment
    const = lower_bound_constant(q).C
    rnorms = {(M, k2): resolvent_norm(calc, M, k2) for M in range(1, M_max + 1) for k2 in block_ks(M)}
    need = [
        (min(q**k2, q ** (2 * k2)) / r) ** 2 for (M, k2), r in rnorms.items() if M == 1 and r > 0
    ]
    m1_req = min(need) if need else math.inf
    adjusted = min(const, m1_req)
    viol = [
        (M, k2)
        for (M, k2), r in rnorms.items()
        if r > adjusted ** -0.5 * min(q**k2, q ** (2 * k2)) * (1 + 1e-12)
    ]
    return CommutatorReport(
        a=a,
        beta=beta,
        delta=delta,
        suprema=suprema,
        block_norms=block_norms,
        resolvent_norms=rnorms,
        constant=const,
        m1_requirement=m1_req,
        adjusted_constant=adjusted,
        resolvent_violations=viol,
        flagged=abs(beta + delta - 1.0) > 1e-12,
    )


def _block_label(key: Key) -> tuple[int, int]:
    M, _, j2, b = key
    return M, j2 + 2 * cal.SHIFT[b]
