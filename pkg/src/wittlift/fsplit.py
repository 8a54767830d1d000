"""Frobenius splittings of Calabi-Yau hypersurfaces through the trace of f^(p-1).

For a form ``f`` of degree n+1 in n+1 variables, the map
``g -> c^-1 * Tr(f^(p-1) * g)`` is a Frobenius splitting whenever the Hasse
scalar ``c`` (the coefficient of (x_0...x_n)^(p-1) in f^(p-1)) is nonzero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import DegreeError, NotFSplitError, SolverFailure
from .exactring import ChartRing, Modulus, ModPoly, coeff_extract, normal_form
from .linalg import solve_mod_p

__all__ = [
    "frobenius_trace",
    "fedder_fsplit_test",
    "FedderResult",
    "build_splitting",
    "SplittingData",
    "ChartSplitting",
    "monic_chart",
]


def frobenius_trace(g: ModPoly, scalars=()) -> ModPoly:
    """The trace (Cartier) operator on monomials.

    ``x^b -> x^((b - (p-1))/p)`` when every b_i = p-1 mod p, else 0.  Variables
    listed in ``scalars`` are treated as base coefficients and pass through
    unchanged.

    >>> from wittlift.exactring import parse_poly
    >>> m = Modulus(5)
    >>> str(frobenius_trace(parse_poly("x^9*y^4*z^4", m)))
    'x'
    """
    if g.modulus is None or g.modulus.e != 1:
        raise ValueError("trace is defined in characteristic p")
    p = g.modulus.p
    scal = {g.vars.index(s) for s in scalars if s in g.vars}
    out = {}
    for e, c in g.terms.items():
        ne = []
        for i, b in enumerate(e):
            if i in scal:
                ne.append(b)
            elif b % p == p - 1:
                ne.append((b - (p - 1)) // p)
            else:
                break
        else:
            ne = tuple(ne)
            out[ne] = out.get(ne, 0) + c
    return ModPoly(g.modulus, g.vars, out)


@dataclass(frozen=True)
class FedderResult:
    split: bool
    hasse_scalar: int

    def to_json(self):
        return {"hasse_scalar": self.hasse_scalar, "split": self.split}


def _check_cy(f: ModPoly):
    n1 = len(f.vars)
    if not f or not f.is_homogeneous() or f.total_degree() != n1:
        raise DegreeError(
            f"expected a form of degree {n1} in {n1} variables",
            degree=f.total_degree(),
            nvars=n1,
        )


def fedder_fsplit_test(f: ModPoly, p: int | None = None) -> FedderResult:
    """Fedder's criterion for a Calabi-Yau hypersurface.

    >>> from wittlift.exactring import parse_poly
    >>> fedder_fsplit_test(parse_poly("x^3 + y^3 + z^3", Modulus(7)))
    FedderResult(split=True, hasse_scalar=6)
    """
    if p is not None and f.modulus.p != p:
        raise ValueError("prime mismatch")
    _check_cy(f)
    p = f.modulus.p
    mult = f ** (p - 1)
    c = coeff_extract(mult, (p - 1,) * len(f.vars))
    return FedderResult(split=c != 0, hasse_scalar=c)


def monic_chart(g: ModPoly, prefer=None):
    """Find a variable in which ``g`` has a constant unit leading coefficient.

    Returns (ChartRing of the rescaled monic relation, unit) or (None, None).
    """
    order = list(g.vars)
    if prefer is not None and prefer in order:
        order.remove(prefer)
        order.insert(0, prefer)
    p = g.modulus.p
    for v in order:
        d = g.degree(v)
        if d < 1:
            continue
        i = g.vars.index(v)
        lead = [(e, c) for e, c in g.terms.items() if e[i] == d]
        if len(lead) == 1 and sum(lead[0][0]) == d and lead[0][1] % p:
            u = lead[0][1]
            inv = pow(u, -1, g.modulus.q)
            return ChartRing(g.scale(inv), v), u
    return None, None


@dataclass(frozen=True)
class ChartSplitting:
    """The splitting restricted to the chart where ``chart_var`` = 1."""

    chart_var: str
    relation: ModPoly
    ring: ChartRing | None
    multiplier: ModPoly
    hasse_scalar: int
    theta: ModPoly

    @property
    def p(self):
        return self.relation.modulus.p

    def sigma(self, g: ModPoly) -> ModPoly:
        inv = pow(self.hasse_scalar, -1, self.p)
        out = frobenius_trace(self.multiplier * g).scale(inv)
        return normal_form(out, self.ring) if self.ring is not None else out

    def section(self, a: ModPoly) -> ModPoly:
        """s(a) = a^p * theta, a set-theoretic section with sigma(s(a)) = a."""
        p = self.p
        ap = ModPoly(a.modulus, a.vars, {tuple(k * p for k in e): c for e, c in a.terms.items()})
        out = ap * self.theta
        return normal_form(out, self.ring) if self.ring is not None else out


@dataclass(frozen=True)
class SplittingData:
    vars: tuple
    f: ModPoly
    multiplier: ModPoly
    hasse_scalar: int
    theta: ModPoly
    charts: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.f.modulus.p

    def sigma(self, g: ModPoly) -> ModPoly:
        inv = pow(self.hasse_scalar, -1, self.p)
        return frobenius_trace(self.multiplier * g).scale(inv)

    def chart(self, var: str) -> ChartSplitting:
        return self.charts[var]


def _solve_theta(sigma, m: Modulus, vars, bound: int) -> ModPoly:
    """Find theta of degree <= bound with sigma(theta) = 1, lowest degree first."""
    monos = []
    for d in range(bound + 1):
        for e in itertools.product(range(d + 1), repeat=len(vars)):
            if sum(e) == d:
                monos.append(e)
    images = [sigma(ModPoly.monomial(m, vars, e)) for e in monos]
    rows_keys = sorted({k for im in images for k in im.terms} | {(0,) * len(vars)})
    rows = [[im.coefficient(k) for im in images] for k in rows_keys]
    rhs = [1 if k == (0,) * len(vars) else 0 for k in rows_keys]
    sol = solve_mod_p(rows, rhs, m.p)
    if sol is None:
        raise SolverFailure("no section theta with sigma(theta) = 1", bound=bound)
    return ModPoly(m, vars, {e: c for e, c in zip(monos, sol) if c})


def build_splitting(f: ModPoly, p: int | None = None) -> SplittingData:
    """The normalized splitting sigma together with its chart restrictions."""
    res = fedder_fsplit_test(f, p)
    if not res.split:
        raise NotFSplitError("not F-split: Hasse scalar vanishes", hasse_scalar=0)
    m = f.modulus
    p = m.p
    c = res.hasse_scalar
    mult = f ** (p - 1)
    inv = pow(c, -1, p)

    def sigma(g):
        return frobenius_trace(mult * g).scale(inv)

    theta = _solve_theta(sigma, m, f.vars, p - 1)
    if sigma(theta) != ModPoly.constant(m, f.vars, 1):
        raise SolverFailure("theta check failed")
    charts = {}
    for v in f.vars:
        f_aff = f.dehomogenize(v)
        ring, _ = monic_chart(f_aff)
        mult_aff = f_aff ** (p - 1)
        theta_aff = theta.dehomogenize(v)
        if ring is not None:
            theta_aff = normal_form(theta_aff, ring)
        charts[v] = ChartSplitting(v, f_aff, ring, mult_aff, c, theta_aff)
    return SplittingData(tuple(f.vars), f, mult, c, theta, charts)
