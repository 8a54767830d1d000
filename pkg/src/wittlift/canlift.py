"""Canonical liftings mod p^2 from Frobenius splittings.

For an F-split hypersurface ``f = sum C_m x^m`` over F_p the Teichmuller
generators satisfy ``sum [C_m][x]^m = V(kappa_f)`` in W_2, with ``kappa_f`` the
carry polynomial.  Passing to the quotient W_2(A)/V(ker sigma) turns V(kappa)
into p*sigma(kappa), so

    f_tilde = sum omega(C_m) X^m - p * S,    S = sigma(kappa_f),

is a lifted equation over Z/p^2 (omega = Teichmuller lift in Z/p^2).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import NotFSplitError, PrimeTooSmallError, SingularCurveError, SolverFailure, WittliftError
from .exactring import ChartRing, Modulus, ModPoly, normal_form
from .fsplit import ChartSplitting, SplittingData, build_splitting, frobenius_trace
from .hassewitt import is_smooth, legendre_hasse_polynomial
from .witt2 import Witt2, evaluate_teichmuller
from . import upoly

__all__ = [
    "teichmuller_int",
    "carry_polynomial",
    "teichmuller_lift_poly",
    "lifted_equation",
    "CanonicalLiftChart",
    "canonical_lift_chart",
    "WeierstrassLift",
    "weierstrass_canonical_lift",
    "weierstrass_form",
    "short_weierstrass_from_general",
    "LegendreFrobenius",
    "legendre_modular_frobenius",
    "legendre_short_weierstrass",
    "in_twist_orbit",
    "twist_orbit",
    "j_invariant",
]


def teichmuller_int(c: int, p: int) -> int:
    """The Teichmuller lift of c in Z/p^2 (c^p for any integer lift)."""
    return pow(c % p, p, p * p)


def carry_polynomial(f: ModPoly, p: int | None = None) -> ModPoly:
    """kappa_f = (sum C_m^p x^(p m) - F^p)/p mod p, on lifts C_m in [0, p).

    This is the second Witt component of sum [C_m x^m].

    >>> from wittlift.exactring import parse_poly
    >>> str(carry_polynomial(parse_poly("u + v", Modulus(5))))
    '4*u^4*v + 3*u^3*v^2 + 3*u^2*v^3 + 4*u*v^4'
    """
    if f.modulus is None or f.modulus.e != 1:
        raise ValueError("carry polynomial expects a characteristic-p input")
    p = f.modulus.p
    m2 = Modulus(p, 2)
    F = f.lift_to(m2)
    pw = ModPoly(m2, f.vars, {tuple(k * p for k in e): pow(c, p, p * p) for e, c in f.terms.items()})
    diff = pw - F**p
    out = {}
    for e, c in diff.terms.items():
        if c % p:
            raise ArithmeticError("carry not divisible by p")
        out[e] = c // p
    return ModPoly(f.modulus, f.vars, out)


def teichmuller_lift_poly(f: ModPoly) -> ModPoly:
    """G = sum omega(C_m) X^m over Z/p^2."""
    p = f.modulus.p
    return ModPoly(Modulus(p, 2), f.vars, {e: teichmuller_int(c, p) for e, c in f.terms.items()})


def _combine(f: ModPoly, S: ModPoly) -> ModPoly:
    p = f.modulus.p
    return teichmuller_lift_poly(f) - S.lift_to(Modulus(p, 2)).scale(p)


def lifted_equation(f: ModPoly, sigma: SplittingData | ChartSplitting, p: int | None = None) -> ModPoly:
    """The lifted equation G - p*sigma(kappa_f) over Z/p^2.

    ``sigma`` is either the homogeneous splitting (then ``f`` is its form) or a
    chart restriction (then ``f`` is the chart relation and S is taken in
    chart normal form).
    """
    if p is not None and p != f.modulus.p:
        raise ValueError("prime mismatch")
    if isinstance(sigma, SplittingData):
        if sigma.f != f:
            raise WittliftError("splitting belongs to a different hypersurface")
    elif isinstance(sigma, ChartSplitting):
        if sigma.relation.vars != f.vars:
            raise WittliftError("splitting chart does not match the relation")
    kappa = carry_polynomial(f)
    S = sigma.sigma(kappa)
    return _combine(f, S)


@dataclass
class CanonicalLiftChart:
    """One affine chart of the canonical lifting W_2(A)/V(ker sigma)."""

    chart: ChartRing
    sigma: ChartSplitting
    lifted_relation: ModPoly

    @property
    def p(self):
        return self.chart.modulus.p

    def witt_normalizer(self, x: Witt2) -> Witt2:
        """(a0, a1) -> (a0, s(sigma(a1))), a canonical representative mod V(ker sigma)."""
        return Witt2(x.a0, self.sigma.section(self.sigma.sigma(x.a1)), self.chart)

    def equal(self, x: Witt2, y: Witt2) -> bool:
        return self.witt_normalizer(x) == self.witt_normalizer(y)

    def evaluate(self, F: ModPoly) -> Witt2:
        """Image of a Z/p^2 polynomial at the Teichmuller generators, normalized."""
        return self.witt_normalizer(evaluate_teichmuller(F, self.chart))

    def postcondition_holds(self) -> bool:
        val = self.evaluate(self.lifted_relation)
        return not val.a0 and not val.a1


def canonical_lift_chart(split: SplittingData, var: str) -> CanonicalLiftChart:
    """Build the chart ``var = 1`` of the canonical lifting and check it."""
    cs = split.chart(var)
    if cs.ring is None:
        raise WittliftError(f"chart {var}=1 has no monic variable", chart=var)
    f_aff = cs.ring.relation
    ftilde = lifted_equation(f_aff, cs)
    return CanonicalLiftChart(cs.ring, cs, ftilde)


# ---------------------------------------------------------------------------
# Weierstrass curves


def weierstrass_form(a: int, b: int, p: int) -> ModPoly:
    """z y^2 - x^3 - a x z^2 - b z^3 over F_p."""
    return ModPoly(Modulus(p), ("x", "y", "z"), {(0, 2, 1): 1, (3, 0, 0): -1, (1, 0, 2): -a, (0, 0, 3): -b})


def j_invariant(a: int, b: int, q: int):
    """j = 1728 * 4a^3 / (4a^3 + 27b^2) mod q, or None when not a unit."""
    num = 1728 * 4 * a**3
    den = (4 * a**3 + 27 * b**2) % q
    try:
        return (num * pow(den, -1, q)) % q
    except ValueError:
        return None


def twist_orbit(at: int, bt: int, p: int):
    """{(u^4 at, u^6 bt) : u = 1 mod p} in (Z/p^2)^2, sorted."""
    q = p * p
    return sorted({((u**4 * at) % q, (u**6 * bt) % q) for u in range(1, q, p)})


def in_twist_orbit(pair, base, p: int) -> bool:
    return tuple(x % (p * p) for x in pair) in twist_orbit(base[0], base[1], p)


def short_weierstrass_from_general(coeffs: dict, q: int):
    """(a1, a2, a3, a4, a6) -> (A, B) with y^2 = x^3 + A x + B, via c4 and c6.

    The change of variables is x_s = x + b2/12, y_s = y + (a1 x + a3)/2 (u = 1).
    """
    a1, a2, a3, a4, a6 = (coeffs[k] % q for k in ("a1", "a2", "a3", "a4", "a6"))
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    A = (-c4 * pow(48, -1, q)) % q
    B = (-c6 * pow(864, -1, q)) % q
    return A, B, {"b2": b2 % q, "b4": b4 % q, "b6": b6 % q, "c4": c4 % q, "c6": c6 % q}


@dataclass(frozen=True)
class WeierstrassLift:
    p: int
    a: int
    b: int
    a_tilde: int
    b_tilde: int
    lifted_relation: ModPoly = field(compare=False, repr=False)
    coordinate_change: dict = field(compare=False, repr=False, default_factory=dict)

    def to_json(self) -> dict:
        return {"p": self.p, "a": self.a, "b": self.b, "a_tilde": self.a_tilde, "b_tilde": self.b_tilde}


_ALLOWED_S = {(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1)}


def weierstrass_canonical_lift(a: int, b: int, p: int) -> WeierstrassLift:
    """Canonical lift of the ordinary curve y^2 = x^3 + a x + b as (a~, b~).

    >>> weierstrass_canonical_lift(1, 0, 5).a_tilde % 5
    1
    """
    if p < 5:
        raise PrimeTooSmallError("Weierstrass normalization needs p >= 5", p=p)
    a %= p
    b %= p
    if not is_smooth(a, b, p):
        raise SingularCurveError("curve is singular", a=a, b=b, p=p)
    f = weierstrass_form(a, b, p)
    try:
        split = build_splitting(f)
    except NotFSplitError:
        raise NotFSplitError("not F-split: the curve is supersingular", a=a, b=b, p=p) from None
    m = Modulus(p)
    kappa = carry_polynomial(f)
    S_hom = split.sigma(kappa)
    S_aff = S_hom.dehomogenize("z")
    f_aff = f.dehomogenize("z")
    ring = ChartRing(f_aff.scale(-1).scale(-1), "y")
    S_nf = normal_form(S_aff, ring)
    extra = [e for e in S_nf.terms if e not in _ALLOWED_S]
    if extra:
        raise SolverFailure("sigma(kappa) has an unexpected pole order at infinity", monomials=[list(e) for e in extra])
    ftilde = _combine(f_aff, S_nf)
    q = p * p
    # f~ = y^2 + a1 x y + a3 y - (c x^3 + a2 x^2 + a4 x + a6)
    if ftilde.coefficient((0, 2)) != 1:
        raise SolverFailure("unexpected y^2 coefficient")
    a1 = ftilde.coefficient((1, 1))
    a3 = ftilde.coefficient((0, 1))
    c = (-ftilde.coefficient((3, 0))) % q
    a2 = (-ftilde.coefficient((2, 0))) % q
    a4 = (-ftilde.coefficient((1, 0))) % q
    a6 = (-ftilde.coefficient((0, 0))) % q
    # X = c x, Y = c y makes the cubic monic
    coeffs = {"a1": a1, "a2": a2, "a3": a3 * c, "a4": a4 * c, "a6": a6 * c * c}
    A, B, inv = short_weierstrass_from_general(coeffs, q)
    change = {
        "scale": c,
        "x_shift": (inv["b2"] * pow(12, -1, q)) % q,
        "y_x_coeff": (coeffs["a1"] * pow(2, -1, q)) % q,
        "y_const": (coeffs["a3"] * pow(2, -1, q)) % q,
    }
    _verify_change(ftilde, A, B, change, q)
    if A % p != a or B % p != b:
        raise SolverFailure("normalized lift does not reduce to the input curve")
    return WeierstrassLift(p, a, b, A, B, ftilde, change)


def _verify_change(ftilde: ModPoly, A: int, B: int, change: dict, q: int):
    """Check that c^2 * f~(x, y) = E(x_s, y_s) for the recorded substitution."""
    m2 = ftilde.modulus
    x, y = ModPoly.gens(m2, ("x", "y"))
    c = change["scale"]
    X = x.scale(c)
    Y = y.scale(c)
    xs = X + change["x_shift"]
    ys = Y + X.scale(change["y_x_coeff"]) + change["y_const"]
    E = ys * ys - xs * xs * xs - xs.scale(A) - B
    if E != ftilde.scale(c * c):
        raise SolverFailure("Weierstrass coordinate change does not match")


# ---------------------------------------------------------------------------
# Legendre family


def legendre_short_weierstrass(mu: int, q: int):
    """(A, B) for y^2 = x(x-1)(x-mu) = x^3 - (1+mu) x^2 + mu x after x -> x + (1+mu)/3."""
    coeffs = {"a1": 0, "a2": -(1 + mu), "a3": 0, "a4": mu, "a6": 0}
    A, B, _ = short_weierstrass_from_general(coeffs, q)
    return A, B


@dataclass
class LegendreFrobenius:
    """The Frobenius lift l -> l^p + p*g(l) of the ordinary Legendre line.

    ``g = numerator/denominator`` exactly over F_p; ``series`` expands g around
    ``expansion_point`` to degree ``D``.
    """

    p: int
    D: int
    numerator: list
    denominator: list
    expansion_point: int
    series: list
    ordinary_points: list
    hasse_polynomial: list

    def value(self, lam: int) -> int:
        return upoly.eval_rational(self.numerator, self.denominator, lam, self.p)

    def derivative(self, lam: int) -> int:
        num, den = upoly.rational_derivative(self.numerator, self.denominator, self.p)
        return upoly.eval_rational(num, den, lam, self.p)

    def ordinarity_scalar(self, lam: int) -> int:
        """lam^(p-1) + g'(lam), the coefficient of xi(d lambda)."""
        p = self.p
        return (pow(lam, p - 1, p) + self.derivative(lam)) % p

    def specialization(self, lam: int):
        """(A, B) of E_mu with mu = omega(lam) + p g(lam) in short Weierstrass form."""
        p = self.p
        q = p * p
        mu = (teichmuller_int(lam, p) + p * self.value(lam)) % q
        return legendre_short_weierstrass(mu, q)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "D": self.D,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "expansion_point": self.expansion_point,
            "series": self.series,
            "ordinary_points": self.ordinary_points,
            "hasse_polynomial": self.hasse_polynomial,
        }


def _legendre_g(p: int):
    """Exact g(l) = N/Dn from the relative trace construction."""
    m = Modulus(p)
    vars = ("l", "x", "y", "z")
    l, x, y, z = ModPoly.gens(m, vars)
    f = z * y * y - x * (x - z) * (x - l * z)
    mult = f ** (p - 1)
    c_poly = [0] * (p)  # coefficient list in l
    hasse = {}
    for e, c in mult.terms.items():
        if e[1:] == (p - 1, p - 1, p - 1):
            hasse[e[0]] = c
    cl = upoly.from_dict(hasse, p)
    kappa = carry_polynomial(f)
    raw = frobenius_trace(mult * kappa, scalars=("l",))
    raw = raw.dehomogenize("z")  # vars (l, x, y)
    # normal form modulo y^2 - x(x-1)(x - l^p)
    l2, x2, y2 = ModPoly.gens(m, ("l", "x", "y"))
    rel = y2 * y2 - x2 * (x2 - 1) * (x2 - l2**p)
    ring = ChartRing(rel, "y")
    S = normal_form(raw, ring)
    S0 = {}
    for e, c in S.terms.items():
        if e[2] == 1:
            if e[1] > 1:
                raise SolverFailure("relative sigma(kappa) has unexpected y-part", exp=list(e))
            continue
        if e[1] > 3:
            raise SolverFailure("relative sigma(kappa) has unexpected x-degree", exp=list(e))
        S0.setdefault(e[1], {})[e[0]] = c
    # S0(X) = sum_k s_k(l) X^k  with s_k in F_p[l]
    sk = [upoly.from_dict(S0.get(k, {}), p) for k in range(4)]
    lp = upoly.monomial(p, p)  # l^p

    def S0_at(pt):
        acc = []
        power = [1]
        for k in range(4):
            acc = upoly.add(acc, upoly.mul(sk[k], power, p), p)
            power = upoly.mul(power, pt, p)
        return acc

    one = [1]
    zero = []
    v1 = S0_at(zero)
    v2 = S0_at(one)
    v3 = S0_at(lp)
    # delta_i = -S0(e_i)/(c * P'(e_i)); P'(0) = l^p, P'(1) = 1 - l^p, P'(l^p) = l^p (l^p - 1)
    d1 = (upoly.neg(v1, p), upoly.mul(cl, lp, p))
    d2 = (upoly.neg(v2, p), upoly.mul(cl, upoly.sub(one, lp, p), p))
    d3 = (upoly.neg(v3, p), upoly.mul(cl, upoly.mul(lp, upoly.sub(lp, one, p), p), p))
    g = upoly.rat_sub(d3, d1, p)
    g = upoly.rat_sub(g, upoly.rat_mul((lp, one), upoly.rat_sub(d2, d1, p), p), p)
    num, den = upoly.rat_normalize(g, p)
    return num, den, cl


def legendre_modular_frobenius(p: int, D: int | None = None, expansion_point: int | None = None) -> LegendreFrobenius:
    """Frobenius lifting l -> l^p + p g(l) on the ordinary Legendre line.

    g is computed exactly as a rational function over F_p and expanded around
    an ordinary point to degree ``D`` (default p^2); the expansion is checked
    against one computed to degree D+5.
    """
    if p < 5:
        raise PrimeTooSmallError("the Legendre construction needs p >= 5", p=p)
    D = p * p if D is None else D
    if D < 1:
        raise ValueError("D must be positive")
    num, den, cl = _legendre_g(p)
    ordinary = [
        lam for lam in range(2, p) if upoly.evaluate(cl, lam, p) != 0 and upoly.evaluate(den, lam, p) != 0
    ]
    if not ordinary:
        raise SolverFailure("no ordinary point in F_p", p=p)
    for lam in range(2, p):
        if upoly.evaluate(cl, lam, p) and not upoly.evaluate(den, lam, p):
            raise SolverFailure("g has a pole at an ordinary point", point=lam)
    lam0 = ordinary[0] if expansion_point is None else expansion_point % p
    if lam0 not in ordinary:
        raise WittliftError("expansion point is not ordinary", point=lam0)
    series = upoly.rational_series(num, den, lam0, D, p)
    longer = upoly.rational_series(num, den, lam0, D + 5, p)
    if longer[: D + 1] != series:
        raise SolverFailure("series truncation is unstable", D=D)
    return LegendreFrobenius(p, D, num, den, lam0, series, ordinary, upoly.trim(cl))


def random_ordinary_curve(p: int, rng: random.Random):
    from .hassewitt import hasse_scalar, smooth_curves

    choices = [(a, b) for a, b in smooth_curves(p) if hasse_scalar(a, b, p)]
    return rng.choice(choices)
