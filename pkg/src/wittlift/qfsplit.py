"""Witt vectors of length m, their reduction mod p, and quasi-F-splittings.

A quasi-F-splitting of level m is an additive map sigma: W_m(A) -> A with
sigma(1) = 1 and sigma(F(x) y) = x_0 sigma(y).  The quotient
W_{m+1}(A)/V(ker sigma) is then a flat Z/p^2-lift of A; an element x is
represented there by the pair (x_0, sigma(y)) where x - [x_0] = V(y).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .canlift import carry_polynomial, teichmuller_int, weierstrass_form
from .errors import PrimeTooSmallError, SingularCurveError, SolverFailure, SplittingError
from .exactring import ChartRing, Modulus, ModPoly, coeff_extract, frobenius_power, normal_form
from .fsplit import ChartSplitting, frobenius_trace, monic_chart
from .hassewitt import hasse_scalar, is_smooth

__all__ = [
    "WittVector",
    "WittBar",
    "rho",
    "QuasiSplitting",
    "QuasiLift",
    "quasi_canonical_lift",
    "splitting_from_frobenius",
    "from_chart_splitting",
    "affine_line_splitting",
    "QFHeight",
    "qf_height_elliptic",
    "level_two_certificate",
]


def _nf(g, ring):
    return normal_form(g, ring) if ring is not None else g


def _lifted(ring: ChartRing | None, modulus: Modulus):
    if ring is None:
        return None
    cache = getattr(ring, "_witt_lifts", None)
    if cache is None:
        cache = {}
        ring._witt_lifts = cache
    if modulus not in cache:
        cache[modulus] = ring.change_modulus(modulus)
    return cache[modulus]


def _pow(g, n, ring):
    return ring.power(g, n) if ring is not None else g**n


class WittVector:
    """(x_0, ..., x_{m-1}) in W_m(A) for A a polynomial or chart ring over F_p."""

    __slots__ = ("comps", "ring")

    def __init__(self, comps, ring: ChartRing | None = None):
        comps = list(comps)
        if not comps:
            raise ValueError("length must be at least 1")
        m0 = comps[0].modulus
        if m0 is None or m0.e != 1:
            raise ValueError("components must live in characteristic p")
        for c in comps[1:]:
            comps[0]._check(c)
        self.ring = ring
        self.comps = tuple(_nf(c, ring) for c in comps)

    @property
    def m(self) -> int:
        return len(self.comps)

    @property
    def p(self) -> int:
        return self.comps[0].modulus.p

    @property
    def vars(self):
        return self.comps[0].vars

    @property
    def modulus(self):
        return self.comps[0].modulus

    def _same(self, other: "WittVector"):
        if not isinstance(other, WittVector):
            raise TypeError(f"expected WittVector, got {type(other).__name__}")
        if other.m != self.m or other.ring != self.ring or other.vars != self.vars:
            raise ValueError("Witt vectors of different length or ring")

    # constructors

    @classmethod
    def zero(cls, m, modulus, vars, ring=None):
        z = ModPoly.zero(modulus, vars)
        return cls([z] * m, ring)

    @classmethod
    def teichmuller(cls, a: ModPoly, m: int, ring=None):
        z = ModPoly.zero(a.modulus, a.vars)
        return cls([a] + [z] * (m - 1), ring)

    @classmethod
    def from_int(cls, n: int, m: int, p: int, vars=(), ring=None):
        """The image of n under Z -> W_m(F_p) -> W_m(A)."""
        if ring is not None:
            vars = ring.vars
        comps = []
        for k in range(m):
            # ghost_k(n) = n = sum_{i<=k} p^i s_i^(p^(k-i)) mod p^(k+1)
            acc = n - sum(p**i * comps[i] ** (p ** (k - i)) for i in range(k))
            acc %= p ** (k + 1)
            if acc % p**k:
                raise ArithmeticError("integer embedding failed")
            comps.append(acc // p**k)
        mod = Modulus(p)
        return cls([ModPoly.constant(mod, vars, c) for c in comps], ring)

    # ghost-based arithmetic

    def _ghosts(self, mod: Modulus, lring):
        lifts = [c.lift_to(mod) for c in self.comps]
        p = self.p
        out = []
        for n in range(self.m):
            acc = ModPoly.zero(mod, self.vars)
            for i in range(n + 1):
                acc = acc + _pow(lifts[i], p ** (n - i), lring).scale(p**i)
            out.append(acc)
        return out

    @staticmethod
    def _from_ghosts(ghosts, p, m, vars, ring, mod, lring):
        comps = []
        lifts = []
        for n in range(m):
            acc = ghosts[n]
            for i in range(n):
                acc = acc - _pow(lifts[i], p ** (n - i), lring).scale(p**i)
            acc = _nf(acc, lring)
            div = {}
            for e, c in acc.terms.items():
                if c % p**n:
                    raise ArithmeticError("ghost components are not compatible")
                div[e] = (c // p**n) % p
            comp = ModPoly(Modulus(p), vars, div)
            comps.append(comp)
            lifts.append(comp.lift_to(mod))
        return WittVector(comps, ring)

    def _binary(self, other, op):
        self._same(other)
        p, m = self.p, self.m
        mod = Modulus(p, m) if m > 1 else Modulus(p, 2)
        lring = _lifted(self.ring, mod)
        gx = self._ghosts(mod, lring)
        gy = other._ghosts(mod, lring)
        gz = [_nf(op(a, b), lring) for a, b in zip(gx, gy)]
        return WittVector._from_ghosts(gz, p, m, self.vars, self.ring, mod, lring)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        # [-1] = -1 for odd p, and [c] scales component i by c^(p^i)
        return WittVector([-c for c in self.comps], self.ring)

    def __mul__(self, other):
        if isinstance(other, int):
            other = WittVector.from_int(other, self.m, self.p, self.vars, self.ring)
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.ring == other.ring and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __repr__(self):
        return "WittVector(" + ", ".join(str(c) for c in self.comps) + ")"

    # structure maps

    def frobenius(self) -> "WittVector":
        return WittVector([_nf(frobenius_power(c), self.ring) for c in self.comps], self.ring)

    def verschiebung(self) -> "WittVector":
        """V: W_m -> W_(m+1)."""
        z = ModPoly.zero(self.modulus, self.vars)
        return WittVector([z] + list(self.comps), self.ring)

    def restrict(self, k: int = 1) -> "WittVector":
        """R^k: W_m -> W_(m-k)."""
        if k >= self.m:
            raise ValueError("cannot restrict below length 1")
        return WittVector(self.comps[: self.m - k], self.ring)

    def extend(self, m: int) -> "WittVector":
        z = ModPoly.zero(self.modulus, self.vars)
        return WittVector(list(self.comps) + [z] * (m - self.m), self.ring)

    def to_json(self):
        return [str(c) for c in self.comps]


class WittBar:
    """An element of W_m(A)/p W_m(A) for a polynomial ring A over F_p.

    Since p W_m(A) = V W_(m-1)(A^p), the normal form removes p-th power
    monomials from components 1..m-1, lowest component first.
    """

    __slots__ = ("vec",)

    def __init__(self, vec: WittVector):
        if vec.ring is not None:
            raise ValueError("normal forms mod p are implemented for polynomial rings")
        self.vec = _bar_normal(vec)

    @property
    def m(self):
        return self.vec.m

    def __add__(self, other):
        return WittBar(self.vec + other.vec)

    def __sub__(self, other):
        return WittBar(self.vec - other.vec)

    def __mul__(self, other):
        return WittBar(self.vec * other.vec)

    def __eq__(self, other):
        if not isinstance(other, WittBar):
            return NotImplemented
        return self.vec == other.vec

    def __hash__(self):
        return hash(self.vec)

    def is_zero(self) -> bool:
        return all(not c for c in self.vec.comps)

    def restrict(self, k: int = 1) -> ModPoly | "WittBar":
        return WittBar(self.vec.restrict(k))

    def __repr__(self):
        return f"WittBar({self.vec})"


def _pth_power_part(g: ModPoly):
    p = g.modulus.p
    root = {}
    for e, c in g.terms.items():
        if all(k % p == 0 for k in e):
            root[tuple(k // p for k in e)] = c
    return ModPoly(g.modulus, g.vars, root)


def _bar_normal(x: WittVector) -> WittVector:
    m = x.m
    for k in range(1, m):
        root = _pth_power_part(x.comps[k])
        if not root:
            continue
        comps = [ModPoly.zero(x.modulus, x.vars)] * m
        comps[k] = frobenius_power(root)
        x = x - WittVector(comps, x.ring)
    return x


def rho(a: ModPoly, m: int) -> WittBar:
    """The class of [a]^p = [a^p] in W_m(A)/p."""
    return WittBar(WittVector.teichmuller(frobenius_power(a), m))


@dataclass
class QuasiSplitting:
    """A candidate quasi-F-splitting sigma: W_m(A) -> A."""

    m: int
    sigma_fn: Callable
    ring: ChartRing | None
    vars: tuple
    p: int
    certificate: dict = field(default_factory=dict)

    def __call__(self, x: WittVector) -> ModPoly:
        if x.m != self.m:
            raise ValueError(f"expected length {self.m}, got {x.m}")
        return _nf(self.sigma_fn(x), self.ring)

    def one(self) -> WittVector:
        return WittVector.from_int(1, self.m, self.p, self.vars, self.ring)

    def section(self, a: ModPoly) -> WittVector:
        """[a^p], which sigma sends to a by F-linearity and sigma(1) = 1."""
        return WittVector.teichmuller(_nf(frobenius_power(a), self.ring), self.m, self.ring)

    def kernel_projection(self, u: WittVector) -> WittVector:
        return u - self.section(self(u))

    def check_unit(self) -> bool:
        return self(self.one()) == ModPoly.constant(Modulus(self.p), self.vars, 1)

    def random_vector(self, rng: random.Random, degree: int | None = None, terms: int = 3) -> WittVector:
        # carries must reach degree ~p^2 for the level-2 components to be exercised
        degree = self.p + 1 if degree is None else degree
        return random_witt(self.m, self.p, self.vars, rng, degree, terms, self.ring)

    def check_additive(self, rng: random.Random, trials: int = 10) -> bool:
        for _ in range(trials):
            x = self.random_vector(rng)
            y = self.random_vector(rng)
            if self(x + y) != _nf(self(x) + self(y), self.ring):
                return False
        return True

    def check_f_linear(self, rng: random.Random, trials: int = 10) -> bool:
        for _ in range(trials):
            x = self.random_vector(rng, terms=2)
            y = self.random_vector(rng)
            lhs = self(x.frobenius() * y)
            rhs = _nf(x.comps[0] * self(y), self.ring)
            if lhs != rhs:
                return False
        return True

    def check_kills_p(self, rng: random.Random, trials: int = 10) -> bool:
        """sigma factors through W_m / p."""
        for _ in range(trials):
            x = self.random_vector(rng)
            if self(x * self.p):
                return False
        return True

    def validate(self, rng: random.Random | None = None, trials: int = 10):
        rng = rng or random.Random(0)
        if not self.check_kills_p(rng, trials):
            raise SplittingError("sigma does not vanish on p W_m")
        if not self.check_unit():
            raise SplittingError("sigma(1) != 1")
        if not self.check_additive(rng, trials):
            raise SplittingError("sigma is not additive")
        if not self.check_f_linear(rng, trials):
            raise SplittingError("sigma is not F-linear")
        return True


def random_poly(p, vars, rng, degree=3, terms=3):
    m = Modulus(p)
    out = {}
    for _ in range(terms):
        e = [0] * len(vars)
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(len(vars))] += 1
        out[tuple(e)] = rng.randrange(p)
    return ModPoly(m, vars, out)


def random_witt(m, p, vars, rng, degree=3, terms=3, ring=None):
    return WittVector([random_poly(p, vars, rng, degree, terms) for _ in range(m)], ring)


def splitting_from_frobenius(tau: Callable, m: int, p: int, vars, ring=None) -> QuasiSplitting:
    """The level-m quasi-splitting tau o R^(m-1) from an F-splitting tau."""
    return QuasiSplitting(m, lambda x: tau(x.comps[0]), ring, tuple(vars), p, {"kind": "frobenius", "level": m})


def from_chart_splitting(cs: ChartSplitting) -> QuasiSplitting:
    """Level-1 quasi-splitting given by an F-split chart."""
    if cs.ring is None:
        raise SplittingError("chart has no monic variable", chart=cs.chart_var)
    q = splitting_from_frobenius(cs.sigma, 1, cs.p, cs.ring.vars, cs.ring)
    q.certificate["chart"] = cs.chart_var
    return q


def affine_line_splitting(p: int, level: int = 1, var: str = "x") -> QuasiSplitting:
    """Quasi-splittings on F_p[x].

    Level 1 lifts Tr(x^(p-1) .) through R.  Level 2 adds a component that does
    not factor through R: sigma(a0, a1) = Tr(x^(p-1) a0) + Tr(Tr(w (a1 - kappa(a0))))
    with w = x^(2p-2), for which Tr(w) = 0.
    """
    vars = (var,)
    m1 = Modulus(p)
    x = ModPoly.var(m1, vars, var)
    xp1 = x ** (p - 1)

    def tau(g):
        return frobenius_trace(xp1 * g)

    if level == 1:
        return splitting_from_frobenius(tau, 1, p, vars)
    if level != 2:
        raise ValueError("affine-line splittings are provided at levels 1 and 2")
    w = x ** (2 * p - 2)

    def sigma(v: WittVector):
        a0, a1 = v.comps
        corr = a1 - carry_polynomial(a0) if a0 else a1
        return tau(a0) + frobenius_trace(frobenius_trace(w * corr))

    return QuasiSplitting(2, sigma, None, vars, p, {"kind": "affine-line", "level": 2, "w": str(w)})


@dataclass
class QuasiLift:
    """The quotient W_(m+1)(A)/V(ker sigma) with normal forms (x_0, sigma(y))."""

    sigma: QuasiSplitting

    @property
    def m(self):
        return self.sigma.m

    @property
    def ring(self):
        return self.sigma.ring

    def normal_form(self, x: WittVector):
        if x.m != self.m + 1:
            raise ValueError(f"expected length {self.m + 1}")
        a0 = x.comps[0]
        rest = x - WittVector.teichmuller(a0, x.m, x.ring)
        y = WittVector(rest.comps[1:], x.ring)
        return a0, self.sigma(y)

    def equal(self, x: WittVector, y: WittVector) -> bool:
        return self.normal_form(x) == self.normal_form(y)

    def evaluate(self, F: ModPoly):
        """Class of F (over Z/p^2) at the Teichmuller generators."""
        p = self.sigma.p
        m1 = Modulus(p)
        vars = F.vars
        M = self.m + 1
        total = WittVector.zero(M, m1, vars, self.ring)
        for e, c in F.terms.items():
            mono = ModPoly.monomial(m1, vars, e)
            term = WittVector.teichmuller(mono, M, self.ring) * WittVector.from_int(c, M, p, vars, self.ring)
            total = total + term
        return self.normal_form(total)

    def kernel_element(self, u: WittVector) -> WittVector:
        return self.sigma.kernel_projection(u)

    def in_ideal(self, x: WittVector) -> bool:
        """Membership in V(ker sigma)."""
        a0, s = self.normal_form(x)
        return not a0 and not s

    def times_p_check(self, x: WittVector) -> bool:
        """p * x and the composite A~ -> A -> A~ agree: both give (0, x_0)."""
        px = x * self.sigma.p
        a0, s = self.normal_form(px)
        return not a0 and s == x.comps[0]

    def lifted_relation(self, f: ModPoly) -> ModPoly:
        """f~ = G - p S with G the Teichmuller-coefficient lift of f."""
        p = self.sigma.p
        m1 = Modulus(p)
        M = self.m + 1
        total = WittVector.zero(M, m1, f.vars, self.ring)
        for e, c in f.terms.items():
            total = total + WittVector.teichmuller(ModPoly.monomial(m1, f.vars, e, c), M, self.ring)
        if total.comps[0]:
            raise SolverFailure("relation does not vanish on the chart")
        y = WittVector(total.comps[1:], self.ring)
        S = self.sigma(y)
        m2 = Modulus(p, 2)
        G = ModPoly(m2, f.vars, {e: teichmuller_int(c, p) for e, c in f.terms.items()})
        return G - S.lift_to(m2).scale(p)


def quasi_canonical_lift(sigma: QuasiSplitting) -> QuasiLift:
    if not sigma.check_unit():
        raise SplittingError("sigma(1) != 1: not a quasi-F-splitting")
    return QuasiLift(sigma)


# ---------------------------------------------------------------------------
# heights of elliptic curves


@dataclass(frozen=True)
class QFHeight:
    height: int
    certificate: dict | None = None

    def to_json(self) -> dict:
        out = {"height": self.height}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def level_two_certificate(a: int, b: int, p: int) -> QuasiSplitting:
    """A level-2 quasi-splitting of the supersingular cubic z y^2 = x^3 + a x z^2 + b z^3.

    With Phi(g) = Tr(f^(p-1) g) (which kills 1 when the Hasse scalar vanishes),
    Z = Phi(kappa_f) and l = f^(p-2) Z, the map

        sigma(a0, a1) = t^-1 (Tr(l a0) + Phi(Phi(a1 - kappa(a0))))

    is additive, F-linear, vanishes on W_2((f)), and sigma(1) = 1 once t is the
    coefficient of (xyz)^(p-1) in l.
    """
    f = weierstrass_form(a, b, p)
    m1 = Modulus(p)
    mult = f ** (p - 1)

    def phi(g):
        return frobenius_trace(mult * g)

    if phi(ModPoly.constant(m1, f.vars, 1)):
        raise SolverFailure("the curve is F-split; no level-2 certificate is needed")
    Z = phi(carry_polynomial(f))
    ell = f ** (p - 2) * Z
    t = coeff_extract(ell, (p - 1,) * 3)
    if not t:
        raise SolverFailure("level-2 ansatz degenerate: unit scalar vanishes", a=a, b=b, p=p)
    tinv = pow(t, -1, p)
    ring, _ = monic_chart(f, prefer="x")

    def sigma(v: WittVector):
        a0, a1 = v.comps
        corr = a1 - carry_polynomial(a0) if a0 else a1
        return (frobenius_trace(ell * a0) + phi(phi(corr))).scale(tinv)

    cert = {
        "level": 2,
        "multiplier": str(ell.scale(tinv)),
        "trace_square_scale": tinv,
        "form": str(f),
    }
    return QuasiSplitting(2, sigma, ring, f.vars, p, cert)


def _check_vanishing(sigma: QuasiSplitting, f: ModPoly, rng: random.Random, trials: int) -> bool:
    """sigma maps W_2((f)) into (f)."""
    ring = sigma.ring
    for _ in range(trials):
        g0 = random_poly(sigma.p, f.vars, rng, 2, 2)
        g1 = random_poly(sigma.p, f.vars, rng, 2, 2)
        v = WittVector([f * g0, f * g1], None)
        if normal_form(sigma.sigma_fn(v), ring):
            return False
    return True


def qf_height_elliptic(a: int, b: int, p: int, trials: int = 6, seed: int = 0) -> QFHeight:
    """Quasi-F-split height of y^2 = x^3 + a x + b: 1 if ordinary, else 2 with a checked certificate."""
    if p < 5:
        raise PrimeTooSmallError("heights are computed for p >= 5", p=p)
    a %= p
    b %= p
    if not is_smooth(a, b, p):
        raise SingularCurveError("curve is singular", a=a, b=b, p=p)
    if hasse_scalar(a, b, p):
        return QFHeight(1)
    sigma = level_two_certificate(a, b, p)
    rng = random.Random(seed)
    sigma.validate(rng, trials)
    if not _check_vanishing(sigma, weierstrass_form(a, b, p), rng, trials):
        raise SplittingError("certificate does not descend to the curve")
    cert = dict(sigma.certificate)
    cert["verified"] = True
    return QFHeight(2, cert)
