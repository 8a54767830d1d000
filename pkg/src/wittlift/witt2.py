"""Length-2 p-typical Witt vectors over characteristic-p chart rings.

A vector is a pair ``(a0, a1)`` of chart-ring elements in normal form.  The
ring structure is the usual one; carries are computed on integer lifts inside
``Z/p^2[x]/(f_hat)`` with ``f_hat`` the naive lift of the chart relation, which
is free over ``Z/p^2`` so exact division by ``p`` is well defined.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Sequence

from .exactring import ChartRing, Modulus, ModPoly, lift_div_p, normal_form

__all__ = [
    "Witt2",
    "witt_add",
    "witt_sub",
    "witt_neg",
    "witt_mul",
    "witt_sum",
    "teichmuller",
    "verschiebung",
    "restrict",
    "witt_frobenius",
    "embed_zp2",
    "ghost_value",
    "from_zp2",
    "evaluate_teichmuller",
]


class ChartMismatch(ValueError):
    pass


def _nf(g: ModPoly, ring: ChartRing | None) -> ModPoly:
    return normal_form(g, ring) if ring is not None else g


def _lifted_ring(ring: ChartRing | None, p: int):
    if ring is None:
        return None
    cache = getattr(ring, "_witt_lift_cache", None)
    if cache is None:
        cache = ring.change_modulus(Modulus(p, 2))
        ring._witt_lift_cache = cache
    return cache


def _power(g: ModPoly, n: int, ring):
    if ring is None:
        return g**n
    return ring.power(g, n)


class Witt2:
    """An element (a0, a1) of W_2(A) for a chart ring A of characteristic p."""

    __slots__ = ("a0", "a1", "ring")

    def __init__(self, a0: ModPoly, a1: ModPoly, ring: ChartRing | None = None):
        if a0.modulus is None or a0.modulus.e != 1:
            raise ValueError("Witt components must live in characteristic p")
        a0._check(a1)
        if ring is not None:
            a0._check(ring.relation)
        self.ring = ring
        self.a0 = _nf(a0, ring)
        self.a1 = _nf(a1, ring)

    @property
    def p(self) -> int:
        return self.a0.modulus.p

    @property
    def modulus(self) -> Modulus:
        return self.a0.modulus

    @property
    def vars(self):
        return self.a0.vars

    def _same(self, other: "Witt2"):
        if not isinstance(other, Witt2):
            raise ChartMismatch(f"expected Witt2, got {type(other).__name__}")
        if self.ring != other.ring or self.a0.vars != other.a0.vars or self.modulus != other.modulus:
            raise ChartMismatch("Witt vectors over different chart rings")

    def zero_like(self) -> "Witt2":
        z = ModPoly.zero(self.modulus, self.vars)
        return Witt2(z, z, self.ring)

    def one_like(self) -> "Witt2":
        return Witt2(ModPoly.constant(self.modulus, self.vars, 1), ModPoly.zero(self.modulus, self.vars), self.ring)

    def __add__(self, other):
        return witt_add(self, other)

    def __sub__(self, other):
        return witt_sub(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __mul__(self, other):
        if isinstance(other, int):
            return witt_mul(self, embed_zp2(other, self.p, self.vars, self.ring))
        return witt_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Witt2):
            return NotImplemented
        return self.ring == other.ring and self.a0 == other.a0 and self.a1 == other.a1

    def __hash__(self):
        return hash((self.a0, self.a1))

    def __repr__(self):
        return f"Witt2({self.a0}, {self.a1})"

    def to_json(self) -> dict:
        return {"a0": self.a0.to_json(), "a1": self.a1.to_json()}


def _carry(terms: Sequence[ModPoly], ring: ChartRing | None) -> ModPoly:
    """Second Witt component of a sum of Teichmuller-type first components.

    Computes ``(sum T_i^p - (sum T_i)^p) / p`` on integer lifts ``T_i``.
    """
    if len(terms) < 2:
        return ModPoly.zero(terms[0].modulus, terms[0].vars) if terms else None
    if len(terms) == 2 and max(len(terms[0]), len(terms[1])) > 1:
        return _carry_pair(terms[0], terms[1], ring)
    m = terms[0].modulus
    p = m.p
    if all(t.is_constant() for t in terms):
        cs = [t.constant_term() for t in terms]
        c = (sum(pow(v, p, p * p) for v in cs) - pow(sum(cs), p, p * p)) % (p * p) // p
        return _nf(ModPoly.constant(m, terms[0].vars, c), ring)
    m2 = Modulus(p, 2)
    lring = _lifted_ring(ring, p)
    lifts = [t.lift_to(m2) for t in terms]
    acc = ModPoly.zero(m2, terms[0].vars)
    total = ModPoly.zero(m2, terms[0].vars)
    for t in lifts:
        acc = acc + _power(t, p, lring)
        total = total + t
    acc = acc - _power(total, p, lring)
    return _nf(lift_div_p(acc), ring)


def _carry_pair(a: ModPoly, b: ModPoly, ring: ChartRing | None) -> ModPoly:
    """-sum_{0<k<p} (C(p,k)/p) a^k b^(p-k), computed directly in characteristic p."""
    p = a.modulus.p
    mul = ring.mul if ring is not None else (lambda u, v: u * v)
    pa = [a]
    pb = [b]
    for _ in range(p - 2):
        pa.append(mul(pa[-1], a))
        pb.append(mul(pb[-1], b))
    acc = ModPoly.zero(a.modulus, a.vars)
    for k in range(1, p):
        acc = acc + mul(pa[k - 1], pb[p - k - 1]).scale((-comb(p, k) // p) % p)
    return acc


def witt_sum(xs: Iterable[Witt2]) -> Witt2:
    """Sum of several vectors with a single carry computation."""
    xs = list(xs)
    if not xs:
        raise ValueError("empty sum")
    first = xs[0]
    for x in xs[1:]:
        first._same(x)
    nonzero = [x.a0 for x in xs if x.a0]
    a0 = sum((x.a0 for x in xs[1:]), xs[0].a0)
    a1 = sum((x.a1 for x in xs[1:]), xs[0].a1)
    if len(nonzero) >= 2:
        a1 = a1 + _carry(nonzero, first.ring)
    return Witt2(a0, a1, first.ring)


def witt_add(x: Witt2, y: Witt2) -> Witt2:
    """Witt addition.

    >>> m = Modulus(5)
    >>> witt_add(embed_zp2(7, 5), embed_zp2(18, 5)) == embed_zp2(0, 5)
    True
    """
    x._same(y)
    a1 = x.a1 + y.a1
    if x.a0 and y.a0:
        a1 = a1 + _carry([x.a0, y.a0], x.ring)
    return Witt2(x.a0 + y.a0, a1, x.ring)


def witt_neg(x: Witt2) -> Witt2:
    # p is odd, so [-1] = -1 and negation is componentwise
    return Witt2(-x.a0, -x.a1, x.ring)


def witt_sub(x: Witt2, y: Witt2) -> Witt2:
    return witt_add(x, witt_neg(y))


def _frob(g: ModPoly, ring) -> ModPoly:
    p = g.modulus.p
    return _nf(ModPoly(g.modulus, g.vars, {tuple(k * p for k in e): c for e, c in g.terms.items()}), ring)


def witt_mul(x: Witt2, y: Witt2) -> Witt2:
    """(x0*y0, x0^p*y1 + x1*y0^p); the p*x1*y1 ghost term dies in char p."""
    x._same(y)
    ring = x.ring
    mul = ring.mul if ring is not None else (lambda a, b: a * b)
    a0 = mul(x.a0, y.a0)
    a1 = mul(_frob(x.a0, ring), y.a1) + mul(x.a1, _frob(y.a0, ring))
    return Witt2(a0, a1, ring)


def teichmuller(u: ModPoly, ring: ChartRing | None = None) -> Witt2:
    return Witt2(u, ModPoly.zero(u.modulus, u.vars), ring)


def verschiebung(u: ModPoly, ring: ChartRing | None = None) -> Witt2:
    return Witt2(ModPoly.zero(u.modulus, u.vars), u, ring)


def restrict(x: Witt2) -> ModPoly:
    return x.a0


def witt_frobenius(x: Witt2) -> Witt2:
    return Witt2(_frob(x.a0, x.ring), _frob(x.a1, x.ring), x.ring)


def embed_zp2(n: int, p: int, vars: Sequence[str] = (), ring: ChartRing | None = None) -> Witt2:
    """The element of W_2(F_p) corresponding to ``n`` in Z/p^2.

    >>> embed_zp2(7, 5)
    Witt2(2, 0)
    >>> embed_zp2(6, 5)
    Witt2(1, 1)
    """
    if ring is not None:
        vars = ring.vars
    n %= p * p
    n0 = n % p
    n1 = ((n - n0**p) // p) % p
    m = Modulus(p, 1)
    return Witt2(ModPoly.constant(m, vars, n0), ModPoly.constant(m, vars, n1), ring)


def ghost_value(x: Witt2) -> int:
    """For constant vectors: a0^p + p*a1 in Z/p^2."""
    if not (x.a0.is_constant() and x.a1.is_constant()):
        raise ValueError("ghost value is defined here only for constants")
    p = x.p
    return (x.a0.constant_term() ** p + p * x.a1.constant_term()) % (p * p)


def from_zp2(n: int, p: int) -> Witt2:
    return embed_zp2(n, p)


def evaluate_teichmuller(F: ModPoly, ring: ChartRing | None = None) -> Witt2:
    """Evaluate a Z/p^2-coefficient polynomial at the Teichmuller generators.

    Each term ``c * x^m`` contributes ``embed(c) * [x^m]``; the sum is formed
    with one carry computation.
    """
    if F.modulus is None or F.modulus.e != 2:
        raise ValueError("expected a polynomial over Z/p^2")
    p = F.modulus.p
    m = Modulus(p, 1)
    vars = F.vars
    if ring is not None and ring.vars != vars:
        raise ChartMismatch("polynomial and chart variables differ")
    pieces = []
    for e, c in F.terms.items():
        w = embed_zp2(c, p, vars, ring)
        mono = ModPoly.monomial(m, vars, e)
        pieces.append(witt_mul(w, teichmuller(mono, ring)))
    if not pieces:
        z = ModPoly.zero(m, vars)
        return Witt2(z, z, ring)
    return witt_sum(pieces)
