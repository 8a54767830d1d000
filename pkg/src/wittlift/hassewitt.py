"""Hasse invariants of elliptic curves by direct coefficient extraction.

This is the classical x^(p-1) coefficient of Q(x)^((p-1)/2); it is kept
separate from the Fedder computation in :mod:`wittlift.fsplit` so the two can
serve as oracles for each other.
"""

from __future__ import annotations

from .exactring import Modulus, ModPoly, coeff_extract

__all__ = ["weierstrass_rhs", "hasse_scalar", "is_smooth", "legendre_hasse_polynomial", "smooth_curves"]


def weierstrass_rhs(a: int, b: int, p: int) -> ModPoly:
    m = Modulus(p)
    return ModPoly(m, ("x",), {(3,): 1, (1,): a, (0,): b})


def is_smooth(a: int, b: int, p: int) -> bool:
    return (4 * a**3 + 27 * b**2) % p != 0


def hasse_scalar(a: int, b: int, p: int) -> int:
    """Coefficient of x^(p-1) in (x^3 + a x + b)^((p-1)/2), in [0, p).

    >>> hasse_scalar(1, 0, 5)
    2
    >>> hasse_scalar(0, 1, 5)
    0
    """
    Q = weierstrass_rhs(a % p, b % p, p)
    return coeff_extract(Q ** ((p - 1) // 2), (p - 1,))


def legendre_hasse_polynomial(p: int) -> ModPoly:
    """Coefficient of x^(p-1) in (x(x-1)(x-l))^((p-1)/2) as a polynomial in l."""
    m = Modulus(p)
    x, l = ModPoly.gens(m, ("x", "l"))
    P = x * (x - 1) * (x - l)
    H = P ** ((p - 1) // 2)
    out = {}
    for e, c in H.terms.items():
        if e[0] == p - 1:
            out[(e[1],)] = c
    return ModPoly(m, ("l",), out)


def smooth_curves(p: int):
    """All (a, b) in F_p^2 giving a smooth short Weierstrass curve."""
    return [(a, b) for a in range(p) for b in range(p) if is_smooth(a, b, p)]
