"""Pure-Python PBW product kernels.

Monomials are triples ``(k, l, n)`` standing for ``alpha(k) gamma(l) (gamma* gamma)^n``,
where negative ``k`` (``l``) means a power of ``alpha*`` (``gamma*``).  Elements are
plain dicts from monomial to complex coefficient; tensor elements use flat 6-tuples.

``orient`` is +1 for the relation ``alpha gamma = q gamma alpha`` and -1 for the
opposite orientation.  Arithmetic is generic: floats, complex numbers and ``Fraction`` all work.
"""

from __future__ import annotations

__all__ = ["alpha_poly", "mul_mono", "mul_terms", "prune", "tensor_mul_terms"]


def alpha_poly(k1: int, k2: int, q: float, orient: int) -> tuple[float, ...]:
    """Coefficients ``p_j`` with ``alpha(k1) alpha(k2) = alpha(k1 + k2) sum_j p_j c^j``."""
    poly = [q ** 0]
    if k1 > 0 > k2:
        a, b = k1, -k2
        for t in range(min(a, b)):
            root = q ** (2 + 2 * orient * (b - t - 1))
            poly = _times_linear(poly, root)
    elif k1 < 0 < k2:
        a, b = k2, -k1
        for t in range(min(a, b)):
            root = q ** (-2 * orient * (a - t - 1))
            poly = _times_linear(poly, root)
    return tuple(poly)


def _times_linear(poly: list[float], root: float) -> list[float]:
    # poly(c) * (1 - root * c)
    out = poly + [poly[0] * 0]
    for j in range(len(poly)):
        out[j + 1] -= root * poly[j]
    return out


def mul_mono(
    m1: tuple[int, int, int], m2: tuple[int, int, int], q: float, orient: int
) -> list[tuple[tuple[int, int, int], float]]:
    k1, l1, n1 = m1
    k2, l2, n2 = m2
    coef = q ** (-orient * (abs(l1) + 2 * n1) * k2)
    l = l1 + l2
    extra = min(abs(l1), abs(l2)) if l1 * l2 < 0 else 0
    k = k1 + k2
    n = n1 + n2 + extra
    return [((k, l, n + j), coef * p) for j, p in enumerate(alpha_poly(k1, k2, q, orient)) if p != 0]


def mul_terms(a: dict, b: dict, q: float, orient: int, tol: float) -> dict:
    out: dict = {}
    cache: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            key = (m1, m2)
            prod = cache.get(key)
            if prod is None:
                prod = mul_mono(m1, m2, q, orient)
                cache[key] = prod
            c12 = c1 * c2
            for m, p in prod:
                out[m] = out.get(m, 0) + c12 * p
    return prune(out, tol)


def tensor_mul_terms(a: dict, b: dict, q: float, orient: int, tol: float) -> dict:
    out: dict = {}
    cache: dict = {}
    for t1, c1 in a.items():
        l1, r1 = t1[:3], t1[3:]
        for t2, c2 in b.items():
            l2, r2 = t2[:3], t2[3:]
            left = cache.get((l1, l2))
            if left is None:
                left = mul_mono(l1, l2, q, orient)
                cache[(l1, l2)] = left
            right = cache.get((r1, r2))
            if right is None:
                right = mul_mono(r1, r2, q, orient)
                cache[(r1, r2)] = right
            c12 = c1 * c2
            for ml, pl in left:
                cl = c12 * pl
                for mr, pr in right:
                    key = ml + mr
                    out[key] = out.get(key, 0) + cl * pr
    return prune(out, tol)


def prune(terms: dict, rel: float) -> dict:
    """Drop coefficients at or below ``rel`` times the largest magnitude.

    Exact zeros are always dropped, so ``rel = 0`` suits rational arithmetic.
    """
    if not terms:
        return terms
    if rel == 0:
        return {t: c for t, c in terms.items() if c != 0}
    cut = rel * max(abs(c) for c in terms.values())
    return {t: c for t, c in terms.items() if abs(c) > cut}
