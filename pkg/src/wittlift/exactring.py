"""Exact arithmetic over Z/p^e: sparse polynomials, chart quotients, truncated series.

Coefficients are plain Python integers kept in ``[0, p^e)``.  A polynomial whose
modulus is ``None`` has unreduced integer coefficients; these are the "integer
lifts" that every division by ``p`` goes through (see :func:`lift_div_p`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

from . import _kernels

__all__ = [
    "Modulus",
    "ModPoly",
    "ChartRing",
    "TruncSeries",
    "PolyParseError",
    "DivisionError",
    "parse_poly",
    "lift_div_p",
    "normal_form",
    "frobenius_power",
    "coeff_extract",
    "is_prime",
]

EXPONENT_LIMIT = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Modulus:
    """The coefficient ring Z/p^e.

    Public inputs use ``e`` in {1, 2}.  Larger exponents are allowed for the
    internal ghost-component computations of longer Witt vectors.
    """

    p: int
    e: int = 1

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p!r}")
        if not isinstance(self.e, int) or self.e < 1:
            raise ValueError(f"e must be a positive integer, got {self.e!r}")

    @cached_property
    def q(self) -> int:
        return self.p**self.e

    def with_e(self, e: int) -> "Modulus":
        return Modulus(self.p, e)


class DivisionError(ArithmeticError):
    """A coefficient that should have been divisible by p was not."""

    def __init__(self, message, monomial=None, coefficient=None):
        super().__init__(message)
        self.monomial = monomial
        self.coefficient = coefficient


def _graded_lex_key(exp):
    return (sum(exp), exp)


def _packed_mul(a: dict, b: dict, q: int):
    """Product through the sparse kernel, exponents packed in mixed radix."""
    r = len(next(iter(a)))
    strides = []
    stride = 1
    for i in range(r):
        strides.append(stride)
        stride *= max(e[i] for e in a) + max(e[i] for e in b) + 1
    if stride >= 1 << 62:
        return None

    def pack(d):
        return [sum(k * s for k, s in zip(e, strides)) for e in d], list(d.values())

    keys, coeffs = _kernels.sparse_mul_mod(*pack(a), *pack(b), q)
    out = {}
    for key, c in zip(keys, coeffs):
        e = [0] * r
        for i in range(r - 1, -1, -1):
            e[i], key = divmod(key, strides[i])
        out[tuple(e)] = c
    return out


def _mul_dicts(a: dict, b: dict, q):
    if len(a) > len(b):
        a, b = b, a
    if q is not None and len(a) * len(b) > 256 and _kernels.fits_int64(q):
        out = _packed_mul(a, b, q)
        if out is not None:
            return out
    out: dict = {}
    get = out.get
    bitems = list(b.items())
    for ea, ca in a.items():
        for eb, cb in bitems:
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = get(e, 0) + ca * cb
    if q is None:
        return {e: c for e, c in out.items() if c}
    res = {}
    for e, c in out.items():
        c %= q
        if c:
            res[e] = c
    return res


class ModPoly:
    """Sparse polynomial over Z/p^e (or over Z when ``modulus`` is None).

    >>> m = Modulus(5)
    >>> x, y = ModPoly.gens(m, ("x", "y"))
    >>> str((x + y) ** 5)
    'x^5 + y^5'
    """

    __slots__ = ("modulus", "vars", "_terms")

    def __init__(self, modulus: Modulus | None, vars: Iterable[str], terms: Mapping | None = None):
        self.modulus = modulus
        self.vars = tuple(vars)
        n = len(self.vars)
        q = modulus.q if modulus is not None else None
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(v) for v in e)
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {self.vars}")
                if any(v < 0 for v in e):
                    raise ValueError(f"negative exponent {e}")
                c = int(c)
                if q is not None:
                    c %= q
                if c:
                    clean[e] = clean.get(e, 0) + c
            if q is not None:
                clean = {e: c % q for e, c in clean.items() if c % q}
            else:
                clean = {e: c for e, c in clean.items() if c}
        self._terms = clean

    @classmethod
    def _raw(cls, modulus, vars, terms):
        obj = cls.__new__(cls)
        obj.modulus = modulus
        obj.vars = vars
        obj._terms = terms
        return obj

    # constructors

    @classmethod
    def zero(cls, modulus, vars):
        return cls._raw(modulus, tuple(vars), {})

    @classmethod
    def constant(cls, modulus, vars, c):
        vars = tuple(vars)
        return cls(modulus, vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, modulus, vars, name):
        vars = tuple(vars)
        i = vars.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(vars)))
        return cls(modulus, vars, {e: 1})

    @classmethod
    def gens(cls, modulus, vars):
        vars = tuple(vars)
        return tuple(cls.var(modulus, vars, v) for v in vars)

    @classmethod
    def monomial(cls, modulus, vars, exp, c=1):
        return cls(modulus, tuple(vars), {tuple(exp): c})

    # basic accessors

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    @property
    def q(self):
        return self.modulus.q if self.modulus is not None else None

    @property
    def p(self):
        return self.modulus.p if self.modulus is not None else None

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: _graded_lex_key(t[0]), reverse=True)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree(self, var: str) -> int:
        if not self._terms:
            return -1
        i = self.vars.index(var)
        return max(e[i] for e in self._terms)

    def coefficient(self, exp) -> int:
        return self._terms.get(tuple(exp), 0)

    def constant_term(self) -> int:
        return self._terms.get((0,) * len(self.vars), 0)

    def is_constant(self) -> bool:
        z = (0,) * len(self.vars)
        return all(e == z for e in self._terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self._terms}
        return len(degs) <= 1

    # ring plumbing

    def _check(self, other: "ModPoly"):
        if self.modulus is other.modulus and self.vars is other.vars:
            return
        if self.modulus != other.modulus or self.vars != other.vars:
            raise ValueError(
                f"ring mismatch: {self.modulus}/{self.vars} vs {other.modulus}/{other.vars}"
            )

    def _coerce(self, other):
        if isinstance(other, ModPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return ModPoly.constant(self.modulus, self.vars, other)
        return NotImplemented

    def _norm(self, c):
        q = self.q
        return c % q if q is not None else c

    def __add__(self, other):
        if other.__class__ is ModPoly:
            self._check(other)
        else:
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        if not other._terms:
            return self
        out = dict(self._terms)
        q = self.q
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if q is not None:
                v %= q
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return ModPoly._raw(self.modulus, self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        q = self.q
        if q is None:
            return ModPoly._raw(self.modulus, self.vars, {e: -c for e, c in self._terms.items()})
        return ModPoly._raw(self.modulus, self.vars, {e: (-c) % q for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ModPoly._raw(self.modulus, self.vars, _mul_dicts(self._terms, other._terms, self.q))

    __rmul__ = __mul__

    def scale(self, c: int) -> "ModPoly":
        q = self.q
        out = {}
        for e, v in self._terms.items():
            v = v * c
            if q is not None:
                v %= q
            if v:
                out[e] = v
        return ModPoly._raw(self.modulus, self.vars, out)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        if len(self._terms) == 1:
            (e, c), = self._terms.items()
            q = self.q
            c = pow(c, n, q) if q is not None else c**n
            return ModPoly._raw(self.modulus, self.vars, {tuple(v * n for v in e): c} if c else {})
        result = ModPoly.constant(self.modulus, self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = ModPoly.constant(self.modulus, self.vars, other)
        if not isinstance(other, ModPoly):
            return NotImplemented
        return self.modulus == other.modulus and self.vars == other.vars and self._terms == other._terms

    def __hash__(self):
        return hash((self.modulus, self.vars, frozenset(self._terms.items())))

    # ring changes

    def reduce(self, modulus: Modulus) -> "ModPoly":
        """Image under Z -> Z/p^e (or Z/p^E -> Z/p^e for e <= E)."""
        if self.modulus is not None:
            if modulus.p != self.modulus.p or modulus.e > self.modulus.e:
                raise ValueError(f"cannot reduce {self.modulus} to {modulus}")
        return ModPoly(modulus, self.vars, self._terms)

    def lift(self) -> "ModPoly":
        """Integer lift with coefficients in [0, p^e)."""
        return ModPoly._raw(None, self.vars, dict(self._terms))

    def lift_to(self, modulus: Modulus) -> "ModPoly":
        """The same representatives read in Z/p^E for E >= e."""
        if self.modulus is None or modulus.p != self.modulus.p or modulus.e < self.modulus.e:
            raise ValueError(f"cannot lift {self.modulus} to {modulus}")
        return ModPoly._raw(modulus, self.vars, dict(self._terms))

    def with_vars(self, vars: Iterable[str]) -> "ModPoly":
        """Re-embed into a ring whose variable list contains ours."""
        vars = tuple(vars)
        idx = []
        for v in self.vars:
            if v not in vars:
                if self.degree(v) > 0:
                    raise ValueError(f"variable {v} missing from target {vars}")
                idx.append(None)
            else:
                idx.append(vars.index(v))
        out = {}
        for e, c in self._terms.items():
            ne = [0] * len(vars)
            for k, i in enumerate(idx):
                if i is not None:
                    ne[i] = e[k]
            ne = tuple(ne)
            out[ne] = out.get(ne, 0) + c
        return ModPoly(self.modulus, vars, out)

    def map_coefficients(self, fn) -> "ModPoly":
        return ModPoly(self.modulus, self.vars, {e: fn(c) for e, c in self._terms.items()})

    # calculus and substitution

    def derivative(self, var: str) -> "ModPoly":
        i = self.vars.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return ModPoly(self.modulus, self.vars, out)

    def substitute(self, values: Mapping[str, "ModPoly | int"], target_vars=None) -> "ModPoly":
        """Replace variables by polynomials (all living over ``target_vars``)."""
        if target_vars is None:
            target_vars = self.vars
        target_vars = tuple(target_vars)
        one = ModPoly.constant(self.modulus, target_vars, 1)
        images = []
        for v in self.vars:
            if v in values:
                val = values[v]
                if isinstance(val, int):
                    val = one.scale(val)
                images.append(val)
            else:
                images.append(ModPoly.var(self.modulus, target_vars, v))
        cache = [dict() for _ in images]

        def power(i, k):
            d = cache[i]
            if k not in d:
                d[k] = images[i] ** k
            return d[k]

        acc = ModPoly.zero(self.modulus, target_vars)
        for e, c in self._terms.items():
            term = one.scale(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            acc = acc + term
        return acc

    def evaluate(self, point: Mapping[str, int]) -> int:
        """Evaluate at integer values; result reduced in the coefficient ring."""
        total = 0
        q = self.q
        vals = [point[v] for v in self.vars]
        for e, c in self._terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t *= pow(v, k, q) if q is not None else v**k
            total += t
        return total % q if q is not None else total

    def homogenize(self, var: str, degree: int | None = None) -> "ModPoly":
        d = self.total_degree() if degree is None else degree
        vars = self.vars + (var,) if var not in self.vars else self.vars
        base = self.with_vars(vars)
        i = vars.index(var)
        out = {}
        for e, c in base._terms.items():
            s = sum(e)
            if s > d:
                raise ValueError("degree bound below total degree")
            ne = e[:i] + (e[i] + d - s,) + e[i + 1:]
            out[ne] = c
        return ModPoly(self.modulus, vars, out)

    def dehomogenize(self, var: str) -> "ModPoly":
        """Set ``var`` = 1 and drop it from the variable list."""
        i = self.vars.index(var)
        vars = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for e, c in self._terms.items():
            ne = e[:i] + e[i + 1:]
            out[ne] = out.get(ne, 0) + c
        return ModPoly(self.modulus, vars, out)

    # text and JSON

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append(("-" if neg else "+", body))
        out = pieces[0][1] if pieces[0][0] == "+" else f"0 - {pieces[0][1]}"
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        ring = "ZZ" if self.modulus is None else f"Z/{self.modulus.p}^{self.modulus.e}"
        return f"ModPoly[{ring}; {','.join(self.vars)}]({self})"

    def to_json(self) -> dict:
        if self.modulus is None:
            raise ValueError("integer polynomials have no JSON form")
        return {
            "p": self.modulus.p,
            "e": self.modulus.e,
            "vars": list(self.vars),
            "terms": [{"exp": list(e), "c": c} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ModPoly":
        m = Modulus(int(data["p"]), int(data["e"]))
        terms = {tuple(t["exp"]): int(t["c"]) for t in data["terms"]}
        return cls(m, data["vars"], terms)


# ---------------------------------------------------------------------------
# parser


class PolyParseError(ValueError):
    """Parse failure; ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, kind: str, message: str, offset: int):
        super().__init__(f"{kind} error at offset {offset}: {message}")
        self.kind = kind
        self.offset = offset


class _Parser:
    def __init__(self, src, modulus, vars, constants, allow_division):
        self.src = src
        self.modulus = modulus
        self.vars = vars
        self.constants = constants or {}
        self.allow_division = allow_division
        self.pos = 0
        self.offsets = []
        off = 0
        for ch in src:
            self.offsets.append(off)
            off += len(ch.encode("utf-8"))
        self.offsets.append(off)

    def error(self, kind, message, pos=None):
        pos = self.pos if pos is None else pos
        raise PolyParseError(kind, message, self.offsets[pos])

    def skip(self):
        while self.pos < len(self.src) and self.src[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self):
        self.skip()
        if self.pos < len(self.src):
            return self.src[self.pos]
        return ""

    def const(self, c):
        return ModPoly.constant(None, self.vars, c)

    def parse(self):
        if not self.src.strip():
            self.skip()
            self.error("syntax", "empty expression")
        val = self.expr()
        if self.peek():
            self.unexpected()
        return val

    def unexpected(self):
        ch = self.peek()
        if ch == "":
            self.error("syntax", "unexpected end of input")
        if not (ch.isascii() and (ch.isalnum() or ch in "+-*^()/")):
            self.error("unknown_character", f"unknown character {ch!r}")
        self.error("syntax", f"unexpected {ch!r}")

    def expr(self):
        val = self.term()
        while self.peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                val = val * self.factor()
            elif ch == "/" and self.allow_division:
                start = self.pos
                self.pos += 1
                d = self.atom_integer()
                val = _exact_divide(val, d, self, start)
            else:
                return val

    def atom_integer(self):
        ch = self.peek()
        if ch.isdigit():
            return self.natural()
        if ch in self.constants:
            self.pos += 1
            return self.constants[ch]
        self.unexpected()

    def factor(self):
        val = self.primary()
        while self.peek() == "^":
            self.pos += 1
            self.skip()
            start = self.pos
            ch = self.peek()
            if ch.isdigit():
                n = self.natural()
            elif ch in self.constants:
                self.pos += 1
                n = self.constants[ch]
            else:
                self.unexpected()
            if n > EXPONENT_LIMIT:
                self.error("overflow", f"exponent {n} exceeds 2^31", start)
            val = val**n
        return val

    def natural(self):
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isascii() and self.src[self.pos].isdigit():
            self.pos += 1
        return int(self.src[start:self.pos])

    def primary(self):
        ch = self.peek()
        if ch == "":
            self.error("syntax", "unexpected end of input")
        if ch == "(":
            self.pos += 1
            val = self.expr()
            if self.peek() != ")":
                if self.peek() == "":
                    self.error("syntax", "missing ')'")
                self.unexpected()
            self.pos += 1
            return val
        if ch.isascii() and ch.isdigit():
            return self.const(self.natural())
        if ch.isascii() and ch.islower():
            if ch in self.constants:
                self.pos += 1
                return self.const(self.constants[ch])
            if ch not in self.vars:
                self.error("syntax", f"variable {ch!r} not in {self.vars}")
            self.pos += 1
            return ModPoly.var(None, self.vars, ch)
        self.unexpected()


def _exact_divide(val: ModPoly, d: int, parser, start):
    out = {}
    for e, c in val.terms.items():
        if c % d:
            parser.error("syntax", f"coefficient {c} of {e} not divisible by {d}", start)
        out[e] = c // d
    return ModPoly(None, val.vars, out)


def _scan_vars(src: str, constants) -> tuple:
    seen = set()
    for ch in src:
        if ch.isascii() and ch.islower() and ch not in constants:
            seen.add(ch)
    return tuple(sorted(seen))


def parse_poly(
    src: str,
    modulus: Modulus,
    vars: Iterable[str] | None = None,
    *,
    constants: Mapping[str, int] | None = None,
    allow_division: bool = False,
) -> ModPoly:
    """Parse a polynomial expression and reduce it into ``Z/p^e``.

    The grammar is::

        expr   := term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := integer | variable | factor '^' natural | '(' expr ')'

    Variables are single lowercase letters; by default they are ordered
    alphabetically.  ``constants`` binds letters to integers (``{"p": 5}``)
    and ``allow_division`` admits an exact integer division ``/n`` evaluated
    over Z before reduction; both are off for the plain grammar.

    >>> str(parse_poly("y^2 - x^3 - x", Modulus(5)))
    '4*x^3 + y^2 + 4*x'
    """
    constants = dict(constants or {})
    if vars is None:
        vars = _scan_vars(src, constants)
    vars = tuple(vars)
    val = _Parser(src, modulus, vars, constants, allow_division).parse()
    return val.reduce(modulus) if modulus is not None else val


# ---------------------------------------------------------------------------
# exact division by p


def lift_div_p(q: ModPoly, p: int | None = None, e: int = 1) -> ModPoly:
    """Divide an integer-lifted polynomial by p exactly and reduce mod p^e.

    ``q`` is either over Z (pass ``p``) or over Z/p^E with E > e, in which
    case its coefficients are read as integers in [0, p^E).

    >>> x, = ModPoly.gens(None, ("x",))
    >>> str(lift_div_p(5 * x + 10, 5))
    'x + 2'
    """
    if q.modulus is not None:
        if p is not None and p != q.modulus.p:
            raise ValueError("prime mismatch")
        p = q.modulus.p
        if e > q.modulus.e - 1:
            raise ValueError(f"cannot recover Z/{p}^{e} from Z/{p}^{q.modulus.e} after dividing by p")
    if p is None:
        raise ValueError("p is required for integer polynomials")
    out = {}
    for mono, c in q.terms.items():
        if c % p:
            name = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(q.vars, mono) if k) or "1"
            raise DivisionError(f"coefficient {c} of monomial {name} is not divisible by {p}", mono, c)
        out[mono] = c // p
    return ModPoly(Modulus(p, e), q.vars, out)


# ---------------------------------------------------------------------------
# chart rings


class ChartRing:
    """Quotient ``R[vars]/(f)`` with ``f`` monic in a distinguished variable.

    ``R`` is the coefficient ring of ``f``.  Normal forms have degree below
    ``deg_v f`` in the distinguished variable.
    """

    def __init__(self, relation: ModPoly, var: str):
        if var not in relation.vars:
            raise ValueError(f"{var} is not a variable of the relation")
        d = relation.degree(var)
        if d < 1:
            raise ValueError(f"relation has no {var}-term")
        i = relation.vars.index(var)
        lead = {e: c for e, c in relation.terms.items() if e[i] == d}
        unit = (0,) * len(relation.vars)
        lead_exp = unit[:i] + (d,) + unit[i + 1:]
        if set(lead) != {lead_exp} or lead[lead_exp] != 1:
            raise ValueError(f"relation is not monic in {var}")
        self.relation = relation
        self.var = var
        self.var_index = i
        self.var_degree = d
        # v^d = tail  (mod f)
        self._tail = ModPoly.monomial(relation.modulus, relation.vars, lead_exp) - relation

    @property
    def modulus(self):
        return self.relation.modulus

    @property
    def vars(self):
        return self.relation.vars

    def __eq__(self, other):
        return isinstance(other, ChartRing) and self.relation == other.relation and self.var == other.var

    def __hash__(self):
        return hash((self.relation, self.var))

    def __repr__(self):
        return f"ChartRing({self.relation} = 0, monic in {self.var})"

    def change_modulus(self, modulus: Modulus | None) -> "ChartRing":
        rel = self.relation.lift() if modulus is None else self.relation.lift().reduce(modulus)
        return ChartRing(rel, self.var)

    def element(self, g: ModPoly) -> ModPoly:
        return normal_form(g, self)

    def zero(self):
        return ModPoly.zero(self.modulus, self.vars)

    def one(self):
        return ModPoly.constant(self.modulus, self.vars, 1)

    def gens(self):
        return ModPoly.gens(self.modulus, self.vars)

    def mul(self, a: ModPoly, b: ModPoly) -> ModPoly:
        return normal_form(a * b, self)

    def power(self, a: ModPoly, n: int) -> ModPoly:
        result = self.one()
        base = normal_form(a, self)
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result


def normal_form(g: ModPoly, ring: ChartRing) -> ModPoly:
    """Reduce ``g`` modulo the chart relation.

    >>> m = Modulus(5)
    >>> R = ChartRing(parse_poly("y^2 - x^3 - x", m), "y")
    >>> str(normal_form(parse_poly("y^3", m, ("x", "y")), R))
    'x^3*y + x*y'
    """
    if g.vars != ring.vars or g.modulus != ring.modulus:
        g._check(ring.relation)
    i = ring.var_index
    d = ring.var_degree
    q = g.q
    work: dict = {}
    for e, c in g.terms.items():
        work.setdefault(e[i], {})[e] = c
    if not work or max(work) < d:
        return g
    tail = list(ring._tail.terms.items())
    out: dict = {}
    for k in range(max(work), -1, -1):
        bucket = work.get(k)
        if not bucket:
            continue
        if k < d:
            for e, c in bucket.items():
                if q is not None:
                    c %= q
                if c:
                    out[e] = out.get(e, 0) + c
            continue
        for e, c in bucket.items():
            if q is not None:
                c %= q
            if not c:
                continue
            base = e[:i] + (e[i] - d,) + e[i + 1:]
            for te, tc in tail:
                ne = tuple(a + b for a, b in zip(base, te))
                b2 = work.setdefault(ne[i], {})
                b2[ne] = b2.get(ne, 0) + c * tc
    return ModPoly(g.modulus, g.vars, out)


def frobenius_power(g: ModPoly) -> ModPoly:
    """Return g^p in the ring of g (honest exponentiation).

    Over Z/p this is the Frobenius endomorphism; it is computed by raising the
    monomial exponents, which is exact in characteristic p.
    """
    p = g.p
    if p is None:
        raise ValueError("frobenius_power needs a modulus")
    if g.modulus.e == 1:
        return ModPoly(g.modulus, g.vars, {tuple(k * p for k in e): pow(c, p, p) for e, c in g.terms.items()})
    return g**p


def coeff_extract(g: ModPoly, monomial) -> int:
    return g.coefficient(tuple(monomial))


# ---------------------------------------------------------------------------
# truncated power series


def _simplex_index(r: int, D: int):
    """All exponent vectors in r variables with total degree <= D, graded."""
    out = []

    def rec(prefix, left, k):
        if k == r - 1:
            out.append(prefix + (left,))
            return
        for a in range(left, -1, -1):
            rec(prefix + (a,), left - a, k + 1)

    for d in range(D + 1):
        if r == 0:
            if d == 0:
                out.append(())
            continue
        rec((), d, 0)
    return out


try:
    from gmpy2 import mpz as _mpz
except ImportError:  # plain int multiplication is correct, only slower
    _mpz = None


def _kron_mul(a: dict, b: dict, r: int, D: int, q: int) -> dict:
    """Truncated product by Kronecker substitution into one big integer."""
    if r == 0:
        c = (a.get((), 0) * b.get((), 0)) % q
        return {(): c} if c else {}
    base = 2 * D + 1
    na = len(a)
    nb = len(b)
    bound = min(na, nb) * (q - 1) ** 2
    w = (bound.bit_length() + 8) // 8  # bytes per slot

    def index(e):
        k = 0
        for v in reversed(e):
            k = k * base + v
        return k

    size = base**r
    buf = bytearray(size * w)
    for e, c in a.items():
        k = index(e) * w
        buf[k:k + w] = c.to_bytes(w, "little")
    A = int.from_bytes(buf, "little")
    buf = bytearray(size * w)
    for e, c in b.items():
        k = index(e) * w
        buf[k:k + w] = c.to_bytes(w, "little")
    B = int.from_bytes(buf, "little")
    if _mpz is not None and size * w > 4096:
        prod = int(_mpz(A) * _mpz(B))
    else:
        prod = A * B
    prod = prod.to_bytes(2 * size * w + 1, "little")
    out = {}
    for e in _simplex_cache(r, D):
        k = index(e) * w
        c = int.from_bytes(prod[k:k + w], "little") % q
        if c:
            out[e] = c
    return out


_SIMPLEX: dict = {}


def _simplex_cache(r, D):
    key = (r, D)
    if key not in _SIMPLEX:
        _SIMPLEX[key] = _simplex_index(r, D)
    return _SIMPLEX[key]


def _trunc_mul(a: dict, b: dict, r: int, D: int, q: int) -> dict:
    if not a or not b:
        return {}
    if len(a) * len(b) < 4096:
        out: dict = {}
        get = out.get
        bl = list(b.items())
        for ea, ca in a.items():
            da = sum(ea)
            for eb, cb in bl:
                if da + sum(eb) > D:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        res = {}
        for e, c in out.items():
            c %= q
            if c:
                res[e] = c
        return res
    return _kron_mul(a, b, r, D, q)


class TruncSeries:
    """Power series over Z/p^e in t_1..t_r, truncated above total degree D."""

    __slots__ = ("modulus", "vars", "D", "_terms")

    def __init__(self, modulus: Modulus, vars: Iterable[str], D: int, terms: Mapping | None = None):
        if D < 0:
            raise ValueError("degree bound must be non-negative")
        self.modulus = modulus
        self.vars = tuple(vars)
        self.D = D
        q = modulus.q
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(v) for v in e)
                if len(e) != len(self.vars):
                    raise ValueError("exponent length mismatch")
                if sum(e) > D:
                    continue
                c = (clean.get(e, 0) + int(c)) % q
                if c:
                    clean[e] = c
                else:
                    clean.pop(e, None)
        self._terms = clean

    @classmethod
    def _raw(cls, modulus, vars, D, terms):
        obj = cls.__new__(cls)
        obj.modulus = modulus
        obj.vars = vars
        obj.D = D
        obj._terms = terms
        return obj

    @classmethod
    def from_poly(cls, g: ModPoly, D: int, modulus: Modulus | None = None) -> "TruncSeries":
        m = modulus or g.modulus
        return cls(m, g.vars, D, g.terms)

    @classmethod
    def one(cls, modulus, vars, D):
        vars = tuple(vars)
        return cls(modulus, vars, D, {(0,) * len(vars): 1})

    @classmethod
    def zero(cls, modulus, vars, D):
        return cls._raw(modulus, tuple(vars), D, {})

    @classmethod
    def gens(cls, modulus, vars, D):
        vars = tuple(vars)
        r = len(vars)
        return tuple(cls(modulus, vars, D, {tuple(int(i == j) for j in range(r)): 1}) for i in range(r))

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    @property
    def p(self):
        return self.modulus.p

    @property
    def q(self):
        return self.modulus.q

    @property
    def r(self):
        return len(self.vars)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def coefficient(self, exp):
        return self._terms.get(tuple(exp), 0)

    def constant_term(self):
        return self._terms.get((0,) * self.r, 0)

    def to_poly(self) -> ModPoly:
        return ModPoly._raw(self.modulus, self.vars, dict(self._terms))

    def truncate(self, D: int) -> "TruncSeries":
        if D > self.D:
            raise ValueError(f"cannot extend precision from {self.D} to {D}")
        return TruncSeries._raw(self.modulus, self.vars, D, {e: c for e, c in self._terms.items() if sum(e) <= D})

    def reduce(self, modulus: Modulus) -> "TruncSeries":
        return TruncSeries(modulus, self.vars, self.D, self._terms)

    def lift_to(self, modulus: Modulus) -> "TruncSeries":
        """Reinterpret coefficients as integers in [0, q) inside a larger ring."""
        return TruncSeries(modulus, self.vars, self.D, self._terms)

    def _check(self, other):
        if self.modulus != other.modulus or self.vars != other.vars:
            raise ValueError("series ring mismatch")

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        if isinstance(other, int):
            return TruncSeries(self.modulus, self.vars, self.D, {(0,) * self.r: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = min(self.D, other.D)
        q = self.q
        out = {e: c for e, c in self._terms.items() if sum(e) <= D} if D < self.D else dict(self._terms)
        for e, c in other._terms.items():
            if D < other.D and sum(e) > D:
                continue
            v = (out.get(e, 0) + c) % q
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return TruncSeries._raw(self.modulus, self.vars, D, out)

    __radd__ = __add__

    def __neg__(self):
        q = self.q
        return TruncSeries._raw(self.modulus, self.vars, self.D, {e: (-c) % q for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "TruncSeries":
        q = self.q
        out = {}
        for e, v in self._terms.items():
            v = (v * c) % q
            if v:
                out[e] = v
        return TruncSeries._raw(self.modulus, self.vars, self.D, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = min(self.D, other.D)
        return TruncSeries._raw(self.modulus, self.vars, D, _trunc_mul(self._terms, other._terms, self.r, D, self.q))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncSeries.one(self.modulus, self.vars, self.D)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = TruncSeries(self.modulus, self.vars, self.D, {(0,) * self.r: other})
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if self.modulus != other.modulus or self.vars != other.vars:
            return False
        D = min(self.D, other.D)
        a = {e: c for e, c in self._terms.items() if sum(e) <= D}
        b = {e: c for e, c in other._terms.items() if sum(e) <= D}
        return a == b

    def __hash__(self):
        return hash((self.modulus, self.vars, self.D, frozenset(self._terms.items())))

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; the constant term must be a unit."""
        c0 = self.constant_term()
        if c0 % self.p == 0:
            raise ZeroDivisionError("constant term is not a unit")
        q = self.q
        inv0 = pow(c0, -1, q)
        # Newton iteration u <- u(2 - a u), doubling the correct degree
        u = TruncSeries(self.modulus, self.vars, 0, {(0,) * self.r: inv0})
        prec = 0
        while prec < self.D:
            prec = min(2 * prec + 1, self.D)
            a = self.truncate(prec)
            u = TruncSeries._raw(self.modulus, self.vars, prec, dict(u._terms))
            u = u * (2 - a * u)
        return u

    def homogeneous_part(self, d: int) -> dict:
        return {e: c for e, c in self._terms.items() if sum(e) == d}

    def derivative(self, var: str) -> "TruncSeries":
        i = self.vars.index(var)
        q = self.q
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                v = (c * e[i]) % q
                if v:
                    out[e[:i] + (e[i] - 1,) + e[i + 1:]] = v
        return TruncSeries._raw(self.modulus, self.vars, max(self.D - 1, 0), out)

    def dilate(self, k: int, D: int | None = None) -> "TruncSeries":
        """Substitute t_i -> t_i^k; the result is exact to degree k*(D+1)-1."""
        newD = k * (self.D + 1) - 1 if D is None else D
        if D is not None and D > k * (self.D + 1) - 1:
            raise ValueError("dilation would need more input precision")
        out = {}
        for e, c in self._terms.items():
            ne = tuple(v * k for v in e)
            if sum(ne) <= newD:
                out[ne] = c
        return TruncSeries._raw(self.modulus, self.vars, newD, out)

    def evaluate(self, point) -> int:
        """Evaluate at a point with coordinates in p*Z/p^2 (modulus e=2).

        Only terms of degree <= 1 survive when every coordinate is divisible by p
        and the ring is Z/p^2.
        """
        q = self.q
        total = 0
        for e, c in self._terms.items():
            t = c
            for v, k in zip(point, e):
                if k:
                    t = t * pow(v, k, q) % q
                    if not t:
                        break
            total += t
        return total % q

    def __str__(self):
        s = str(self.to_poly())
        return f"{s} + O({self.D + 1})"

    def __repr__(self):
        return f"TruncSeries[Z/{self.modulus.p}^{self.modulus.e}; {','.join(self.vars)}; D={self.D}]({self.to_poly()})"

    def to_json(self) -> dict:
        d = self.to_poly().to_json()
        d["D"] = self.D
        return d
