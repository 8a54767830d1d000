"""Frobenius liftings on truncated power series and their canonical coordinates.

A lifting is ``t_i -> t_i^p + p f_i`` over Z/p^2[[t]].  It induces the operator

    xi(sum g_i dt_i) = sum g_i(t^p) (t_i^(p-1) dt_i + d f_i)   (mod p)

on 1-forms, which is (1/p) times the pullback of any lift of the form.  Forms
fixed by xi are logarithmic differentials d log q, and each such q has a unique
lift q~ with F*(q~) = q~^p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DimensionDeficitError, InconsistentInputError, NotOrdinaryError, SolverFailure
from .exactring import Modulus, ModPoly, TruncSeries, lift_div_p, parse_poly
from .linalg import det_mod, nullspace_mod_p

__all__ = [
    "FrobeniusLift",
    "OneForm",
    "xi_apply",
    "xi_explicit",
    "is_ordinary_lift",
    "teichmuller_point",
    "fixed_forms",
    "dlog_solve",
    "dlog",
    "pth_root",
    "lift_multiplicative",
    "in_frobenius_ideal",
    "in_point_ideal_power",
    "multiplicative_coordinates",
    "theta_map",
    "cartier_section",
    "default_degree",
]


def default_degree(p: int) -> int:
    return max(p * p, 12)


def _series_from_poly(g: ModPoly, D: int, modulus: Modulus) -> TruncSeries:
    return TruncSeries(modulus, g.vars, D, {e: c for e, c in g.terms.items()})


@dataclass(frozen=True)
class FrobeniusLift:
    """t_i -> t_i^p + p f_i with the f_i given exactly as integer polynomials."""

    p: int
    vars: tuple
    f: tuple  # ModPoly over Z/p^2

    def __post_init__(self):
        if len(self.f) != len(self.vars):
            raise ValueError("need one image per variable")
        for g in self.f:
            if g.vars != self.vars:
                raise ValueError("image variables do not match")

    @property
    def r(self) -> int:
        return len(self.vars)

    @property
    def modulus(self) -> Modulus:
        return Modulus(self.p, 2)

    @classmethod
    def from_strings(cls, srcs, p: int, vars=None) -> "FrobeniusLift":
        """Parse ``f_i`` expressions; ``p`` is a named constant and ``/p`` is allowed."""
        srcs = [s.strip() for s in srcs]
        if vars is None:
            letters = sorted({c for s in srcs for c in s if c.isalpha() and c.islower() and c != "p"})
            vars = tuple(letters)
        polys = [parse_poly(s, None, vars, constants={"p": p}, allow_division=True) for s in srcs]
        m2 = Modulus(p, 2)
        return cls(p, tuple(vars), tuple(g.reduce(m2) for g in polys))

    @classmethod
    def from_images(cls, images, p: int, vars) -> "FrobeniusLift":
        """From integer polynomials F(t_i); requires F(t_i) = t_i^p mod p."""
        vars = tuple(vars)
        out = []
        for i, img in enumerate(images):
            img = img.lift().with_vars(vars) if img.modulus is not None else img.with_vars(vars)
            tp = ModPoly.monomial(None, vars, tuple(p if j == i else 0 for j in range(len(vars))))
            out.append(lift_div_p(img - tp, p, 2))
        return cls(p, vars, tuple(out))

    @classmethod
    def multiplicative(cls, p: int, vars=("t",)) -> "FrobeniusLift":
        """The lift (1 + t_i)^p - 1 in each variable."""
        vars = tuple(vars)
        images = []
        for v in vars:
            t = ModPoly.var(None, vars, v)
            images.append((t + 1) ** p - 1)
        return cls.from_images(images, p, vars)

    def f_series(self, D: int) -> tuple:
        return tuple(_series_from_poly(g, D, self.modulus) for g in self.f)

    def pullback(self, g: TruncSeries, D: int | None = None) -> TruncSeries:
        """F*(g) = g(t^p) + p sum_j (d_j g)(t^p) f_j over Z/p^2."""
        if g.modulus != self.modulus or g.vars != self.vars:
            raise ValueError("series ring mismatch")
        p = self.p
        if g.D < 1:
            raise ValueError("pullback needs the input known to degree >= 1")
        Dmax = p * g.D - 1
        Dout = Dmax if D is None else D
        if Dout > Dmax:
            raise ValueError(f"pullback of a degree-{g.D} series is known only to degree {Dmax}")
        out = g.dilate(p, Dout)
        fs = self.f_series(Dout)
        corr = TruncSeries.zero(self.modulus, self.vars, Dout)
        for v, fj in zip(self.vars, fs):
            corr = corr + g.derivative(v).dilate(p, Dout) * fj
        return out + corr.scale(p)

    def jacobian(self):
        """[d f_i / d t_j](0) mod p."""
        p = self.p
        r = self.r
        return [[self.f[i].coefficient(tuple(int(k == j) for k in range(r))) % p for j in range(r)] for i in range(r)]

    def to_json(self) -> dict:
        return {"p": self.p, "vars": list(self.vars), "f": [str(g) for g in self.f]}


@dataclass(frozen=True)
class OneForm:
    """sum g_i dt_i over F_p, coefficients known to degree D."""

    comps: tuple

    def __post_init__(self):
        if not self.comps:
            raise ValueError("empty form")
        D = min(c.D for c in self.comps)
        object.__setattr__(self, "comps", tuple(c.truncate(D) for c in self.comps))

    @property
    def D(self) -> int:
        return self.comps[0].D

    @property
    def vars(self):
        return self.comps[0].vars

    @property
    def modulus(self):
        return self.comps[0].modulus

    @classmethod
    def zero(cls, p, vars, D):
        m = Modulus(p)
        return cls(tuple(TruncSeries.zero(m, vars, D) for _ in vars))

    def truncate(self, D: int) -> "OneForm":
        return OneForm(tuple(c.truncate(D) for c in self.comps))

    def __add__(self, other):
        return OneForm(tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other):
        return OneForm(tuple(a - b for a, b in zip(self.comps, other.comps)))

    def scale(self, c: int) -> "OneForm":
        return OneForm(tuple(g.scale(c) for g in self.comps))

    def times(self, u: TruncSeries) -> "OneForm":
        return OneForm(tuple(g * u for g in self.comps))

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return all(a == b for a, b in zip(self.comps, other.comps))

    def __hash__(self):
        return hash(self.comps)

    def is_zero(self) -> bool:
        return all(not c for c in self.comps)

    def exterior_derivative(self) -> dict:
        """{(i, j): d_i g_j - d_j g_i} for i < j."""
        out = {}
        vs = self.vars
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                out[(i, j)] = self.comps[j].derivative(vs[i]) - self.comps[i].derivative(vs[j])
        return out

    def is_closed(self) -> bool:
        return all(not v for v in self.exterior_derivative().values())

    def to_json(self) -> dict:
        return {"D": self.D, "components": [str(c.to_poly()) for c in self.comps]}


def _check_pair(F: FrobeniusLift, w: OneForm):
    if w.vars != F.vars or w.modulus != Modulus(F.p):
        raise ValueError("form and lifting live on different rings")


def xi_apply(F: FrobeniusLift, w: OneForm, D: int | None = None) -> OneForm:
    """(1/p) F*(w~) for the naive lift w~, reduced mod p.

    The pullback route determines the result to degree p*D_w - 1.
    """
    _check_pair(F, w)
    p = F.p
    m2 = F.modulus
    Dout = p * w.D - 1 if D is None else D
    lifted = [g.lift_to(m2) for g in w.comps]
    pulled = [F.pullback(g, Dout) for g in lifted]
    fs = F.f_series(Dout + 1)
    comps = []
    for j, v in enumerate(F.vars):
        # d(t_j^p + p f_j) contributes p t_j^(p-1) dt_j + p df_j
        acc = TruncSeries.zero(m2, F.vars, Dout)
        tp = TruncSeries(m2, F.vars, Dout, {tuple(p - 1 if k == j else 0 for k in range(F.r)): p})
        acc = acc + pulled[j] * tp
        for i in range(F.r):
            acc = acc + pulled[i] * fs[i].derivative(v).scale(p)
        comps.append(acc)
    m1 = Modulus(p)
    out = []
    for c in comps:
        div = lift_div_p(c.to_poly(), p, 1)
        out.append(TruncSeries(m1, F.vars, min(c.D, Dout), div.terms))
    return OneForm(tuple(out))


def xi_explicit(F: FrobeniusLift, w: OneForm, D: int | None = None) -> OneForm:
    """sum_i g_i(t^p) (t_i^(p-1) dt_i + d f_i), computed directly mod p."""
    _check_pair(F, w)
    p = F.p
    m1 = Modulus(p)
    Dout = p * (w.D + 1) - 1 if D is None else D
    gp = [g.dilate(p, Dout) for g in w.comps]
    fs = [_series_from_poly(g.reduce(m1), Dout + 1, m1) for g in F.f]
    comps = []
    for j, v in enumerate(F.vars):
        tp = TruncSeries(m1, F.vars, Dout, {tuple(p - 1 if k == j else 0 for k in range(F.r)): 1})
        acc = gp[j] * tp
        for i in range(F.r):
            acc = acc + gp[i] * fs[i].derivative(v)
        comps.append(acc.truncate(Dout))
    return OneForm(tuple(comps))


def is_ordinary_lift(F: FrobeniusLift) -> bool:
    """det [d f_i / d t_j](0) is a unit."""
    return det_mod(F.jacobian(), F.p) != 0


def teichmuller_point(F: FrobeniusLift) -> tuple:
    """The point c in (p Z/p^2)^r compatible with the lifting: c_i = p f_i(0)."""
    p = F.p
    return tuple((p * g.constant_term()) % (p * p) for g in F.f)


def _iterate_fixed(F: FrobeniusLift, w0: OneForm, D: int) -> OneForm:
    """Iterate w <- xi(w) from a constant form; precision grows k -> p(k+1)-1."""
    w = w0
    while w.D < D:
        target = min(F.p * (w.D + 1) - 1, D)
        w = xi_explicit(F, w, target)
    return w.truncate(D)


def fixed_forms(F: FrobeniusLift, D: int | None = None, check: bool = True) -> list:
    """Basis of the F_p-space of forms fixed by xi, truncated at degree D.

    The constant terms of a fixed form are the fixed vectors of J(0)^T, and the
    higher terms are then forced.  Raises DimensionDeficitError when that space
    has dimension below r.
    """
    p = F.p
    D = default_degree(p) if D is None else D
    if not is_ordinary_lift(F):
        raise NotOrdinaryError("the lifting is not ordinary", jacobian=F.jacobian())
    r = F.r
    J = F.jacobian()
    # g(0) = J^T g(0): solve (J^T - I) v = 0
    rows = [[(J[j][i] - (1 if i == j else 0)) % p for j in range(r)] for i in range(r)]
    basis = nullspace_mod_p(rows, p, r)
    if len(basis) < r:
        raise DimensionDeficitError(
            "fixed forms span less than r dimensions over F_p",
            found=len(basis),
            r=r,
            D=D,
        )
    m1 = Modulus(p)
    out = []
    for v in basis:
        w0 = OneForm(tuple(TruncSeries(m1, F.vars, 0, {(0,) * r: c}) for c in v))
        w = _iterate_fixed(F, w0, D)
        if check:
            if xi_explicit(F, w, D) != w:
                raise SolverFailure("fixed-form iteration did not converge", D=D)
            if not w.is_closed():
                raise SolverFailure("fixed form is not closed", D=D)
        out.append(w)
    return out


def dlog(q: TruncSeries) -> OneForm:
    """d log q = dq / q."""
    inv = q.inverse()
    return OneForm(tuple(q.derivative(v) * inv for v in q.vars))


def _hom_product_coeffs(q: dict, g: TruncSeries, d: int) -> dict:
    """Degree-d part of q * g with q given as a dict of known coefficients."""
    out: dict = {}
    for ea, ca in q.items():
        da = sum(ea)
        if da > d:
            continue
        for eb, cb in g.terms.items():
            if da + sum(eb) != d:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return out


def _monomials(r: int, d: int):
    if r == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in _monomials(r - 1, d - a):
            yield (a,) + rest


def dlog_solve(w: OneForm, tie_break="zero", rng: random.Random | None = None) -> TruncSeries:
    """A unit q with q(0) = 1 and dq/q = w, to the form's precision + 1.

    Coefficients at exponents divisible by p are free; ``tie_break`` is
    ``"zero"`` or ``"random"`` (drawn from ``rng``).
    """
    if not w.is_closed():
        raise InconsistentInputError("form is not closed")
    p = w.modulus.p
    vars = w.vars
    r = len(vars)
    D = w.D + 1
    if tie_break == "random" and rng is None:
        rng = random.Random(0)
    q = {(0,) * r: 1}
    for d in range(1, D + 1):
        parts = [_hom_product_coeffs(q, g, d - 1) for g in w.comps]
        new = {}
        for n in _monomials(r, d):
            val = None
            for i in range(r):
                if n[i] == 0:
                    continue
                src = n[:i] + (n[i] - 1,) + n[i + 1:]
                rhs = parts[i].get(src, 0) % p
                if n[i] % p:
                    cand = (rhs * pow(n[i], -1, p)) % p
                    if val is None:
                        val = cand
                    elif cand != val:
                        raise InconsistentInputError("form is not a logarithmic differential", monomial=list(n))
                elif rhs:
                    raise InconsistentInputError("form is not a logarithmic differential", monomial=list(n))
            if val is None:
                val = rng.randrange(p) if tie_break == "random" else 0
            if val:
                new[n] = val
        q.update(new)
    return TruncSeries(Modulus(p), vars, D, q)


def pth_root(u: TruncSeries):
    """v with v^p = u over F_p, or None when u is not a p-th power."""
    p = u.p
    if u.modulus.e != 1:
        raise ValueError("p-th roots are taken in characteristic p")
    out = {}
    for e, c in u.terms.items():
        if any(k % p for k in e):
            return None
        out[tuple(k // p for k in e)] = c
    return TruncSeries(u.modulus, u.vars, u.D // p, out)


def lift_multiplicative(F: FrobeniusLift, q: TruncSeries, D: int | None = None) -> TruncSeries:
    """The unique q~ = q mod p with F*(q~) = q~^p, to degree D.

    ``q`` must be known to degree p*D.
    """
    p = F.p
    m2 = F.modulus
    if D is None:
        D = q.D // p
    if q.D < p * D:
        raise ValueError(f"need q to degree {p * D} for a lift to degree {D}")
    qhat = q.lift_to(m2).truncate(p * D)
    lhs = qhat ** p
    rhs = F.pullback(qhat.truncate(D + 1), p * D)
    diff = (lhs - rhs).to_poly()
    h_at_tp = lift_div_p(diff, p, 1)
    h = {}
    for e, c in h_at_tp.terms.items():
        if any(k % p for k in e):
            raise InconsistentInputError("d log q is not fixed by xi", monomial=list(e))
        h[tuple(k // p for k in e)] = c
    hs = TruncSeries(m2, F.vars, D, h).scale(p)
    qt = qhat.truncate(D) + hs
    if F.pullback(qt, D) != qt**p:
        raise SolverFailure("multiplicative lift check failed", D=D)
    return qt


def in_frobenius_ideal(F: FrobeniusLift, h: TruncSeries) -> bool:
    """Membership of h in the ideal (t_j^p + p (f_j - f_j(0))) at truncation.

    The mod-p part is tested through degree D and the p-part through
    degree D - p + 1, which is what the truncation determines.
    """
    p = F.p
    q = p * p
    r = F.r
    D = h.D
    u = []
    for g in F.f:
        terms = {e: c for e, c in g.terms.items() if any(e)}
        u.append(terms)
    work = {e: c % q for e, c in h.terms.items() if c % q}
    ppart: dict = {}
    # move monomials of the mod-p part with an exponent >= p into the p-part
    for d in range(D, -1, -1):
        for e in [e for e in work if sum(e) == d]:
            c = work.pop(e)
            c0 = c % p
            c1 = c // p
            if c1:
                ppart[e] = (ppart.get(e, 0) + c1) % p
            if not c0:
                continue
            j = next((j for j in range(r) if e[j] >= p), None)
            if j is None:
                work[e] = c0
                continue
            rest = e[:j] + (e[j] - p,) + e[j + 1:]
            for eu, cu in u[j].items():
                ne = tuple(a + b for a, b in zip(rest, eu))
                ppart[ne] = (ppart.get(ne, 0) - c0 * cu) % p
    if any(c % p for c in work.values()):
        return False
    limit = D - p + 1
    for e, c in ppart.items():
        if c % p and sum(e) <= limit and all(k < p for k in e):
            return False
    return True


def in_point_ideal_power(F: FrobeniusLift, h: TruncSeries) -> bool:
    """Membership of h in J^p + pJ, J the ideal of the Teichmuller point c.

    In the coordinates s = t - c this ideal is (s)^p + p(s), so h qualifies
    when h(c) = 0 mod p^2 and h has no terms of degree 1..p-1 mod p (c = 0 mod p);
    below degree p-1 only the known terms are tested.
    """
    p = F.p
    c = teichmuller_point(F)
    if h.evaluate(c) % (p * p):
        return False
    return all(c0 % p == 0 for e, c0 in h.terms.items() if 0 < sum(e) < p)


@dataclass(frozen=True)
class Coordinates:
    """Output of :func:`multiplicative_coordinates`."""

    lift: FrobeniusLift
    D: int
    ordinary: bool
    teichmuller_point: tuple
    forms: tuple
    q: tuple
    q_tilde: tuple

    def to_json(self) -> dict:
        return {
            "p": self.lift.p,
            "D": self.D,
            "vars": list(self.lift.vars),
            "ordinary": self.ordinary,
            "teichmuller_point": list(self.teichmuller_point),
            "fixed_forms": [w.to_json()["components"] for w in self.forms],
            "q_tilde": [str(x.to_poly()) for x in self.q_tilde],
        }


def multiplicative_coordinates(
    F: FrobeniusLift, D: int | None = None, tie_break="zero", rng=None, validate: bool = True
) -> Coordinates:
    """Fixed forms, their multiplicative potentials and the lifts q~_i to degree D."""
    p = F.p
    D = default_degree(p) if D is None else D
    forms = fixed_forms(F, p * D - 1)
    qs = tuple(dlog_solve(w, tie_break=tie_break, rng=rng) for w in forms)
    qt = tuple(lift_multiplicative(F, q, D) for q in qs)
    c = teichmuller_point(F)
    if validate:
        for x in qt:
            if x.evaluate(c) != 1:
                raise SolverFailure("q~ - 1 does not vanish at the Teichmuller point")
        r = F.r
        jac = [[x.coefficient(tuple(int(k == j) for k in range(r))) % p for j in range(r)] for x in qt]
        if det_mod(jac, p) == 0:
            raise SolverFailure("q~ - 1 do not generate the Teichmuller ideal")
        # stability: a run at D + 3 agrees on the overlap
        longer = fixed_forms(F, p * (D + 3) - 1)
        if any(a.truncate(p * D - 1) != b for a, b in zip(longer, forms)):
            raise SolverFailure("fixed forms unstable under truncation", D=D)
    short_forms = tuple(w.truncate(D) for w in forms)
    return Coordinates(F, D, is_ordinary_lift(F), c, short_forms, tuple(q.truncate(D) for q in qs), qt)


# ---------------------------------------------------------------------------
# the maps between W_2 and the lifted ring


def theta_map(x0: TruncSeries, x1: TruncSeries) -> TruncSeries:
    """theta(x0, x1) = x0~^p + p x1~ over Z/p^2 (independent of the lifts)."""
    if x0.modulus.e != 1 or x1.modulus.e != 1:
        raise ValueError("Witt components live in characteristic p")
    p = x0.p
    m2 = Modulus(p, 2)
    D = min(x0.D, x1.D)
    a = x0.lift_to(m2).truncate(D)
    b = x1.lift_to(m2).truncate(D)
    return a**p + b.scale(p)


def cartier_section(F: FrobeniusLift, y: TruncSeries):
    """t(F)(y) = (y mod p, delta(y)) with F*(y) = y^p + p delta(y)."""
    p = F.p
    if y.modulus != F.modulus:
        y = y.lift_to(F.modulus)
    D = y.D
    diff = (F.pullback(y, D) - y**p).to_poly()
    delta = lift_div_p(diff, p, 1)
    m1 = Modulus(p)
    return y.reduce(m1), TruncSeries(m1, F.vars, D, delta.terms)
