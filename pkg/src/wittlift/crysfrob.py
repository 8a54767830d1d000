"""Crystalline Frobenius on H^1_dR of elliptic curves over Z/p^2.

Frobenius is lifted to the weak completion by x -> x^p and
1/y -> y^-p * sum_k binom(-1/2, k) E^k y^(-2pk), E = Q(x^p) - Q(x)^p, then each
image form is reduced to the basis (dx/y, x dx/y) by exact forms.  Working
precision is p^N with N = 2 + slack + (p-adic loss bound); the result is
recomputed with slack + 1 and the two must agree mod p^2.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb

from . import _kernels
from .canlift import twist_orbit, weierstrass_canonical_lift
from .errors import NotPreservedError, PrecisionError, PrimeTooSmallError, SingularCurveError, SolverFailure
from .exactring import is_prime
from .linalg import inverse_mod

__all__ = [
    "FrobMatrix2",
    "frobenius_matrix",
    "point_count_ap",
    "f1_preserved",
    "beta_scalar",
    "enumerate_f1_lifts",
    "lift_matrices",
    "uniqueness_report",
    "default_slack",
]


def default_slack() -> int:
    raw = os.environ.get("WITTLIFT_SLACK")
    if raw is None or raw == "":
        return 2
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(f"WITTLIFT_SLACK must be an integer, got {raw!r}") from None
    if val < 2:
        raise ValueError("WITTLIFT_SLACK must be at least 2")
    return val


@dataclass(frozen=True)
class FrobMatrix2:
    """Matrix of Frobenius on H^1_dR mod p^2.

    ``entries[i][j]`` is the coefficient of basis form i in the image of basis
    form j; the basis is (dx/y, x dx/y) and F^1 is spanned by dx/y.
    """

    p: int
    a_tilde: int
    b_tilde: int
    entries: tuple

    @property
    def trace(self) -> int:
        return (self.entries[0][0] + self.entries[1][1]) % (self.p**2)

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.entries
        return (a * d - b * c) % (self.p**2)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "a_tilde": self.a_tilde,
            "b_tilde": self.b_tilde,
            "matrix": [list(r) for r in self.entries],
            "trace": self.trace,
            "det": self.det,
            "f1_preserved": f1_preserved(self),
        }


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _loss_bound(p: int, K: int) -> int:
    """Total p-adic valuation of all divisors the reduction may use."""
    smax = p * (2 * K - 1)
    degs = {p * (2 * k + 1): 2 * p - 1 + 3 * p * k for k in range(K)}
    d = -1
    e = 0
    for s in range(smax, 2, -2):
        if s in degs:
            d = max(d, degs[s])
        if d >= 0:
            e += _vp(s - 2, p)
            d = max(d - 3, 1)
    for m in range(d - 2, -1, -1):
        e += _vp(2 * m + 3, p)
    return e


def _binom_half(k: int, q: int) -> int:
    """binom(-1/2, k) = (-1)^k C(2k, k) / 4^k mod q."""
    return ((-1) ** k * comb(2 * k, k) * pow(4**k, -1, q)) % q


def _raw_matrix(at: int, bt: int, p: int, slack: int):
    K = slack + 1
    N = 2 + slack + _loss_bound(p, K)
    q = p**N
    at %= q
    bt %= q
    Q = [bt, at, 0, 1]
    Qfrob = [0] * (3 * p + 1)
    Qfrob[0] = bt
    Qfrob[p] = at
    Qfrob[3 * p] = 1
    Qp = [1]
    for _ in range(p):
        Qp = _kernels.poly_mul_mod(Qp, Q, q)
    E = [(x - y) % q for x, y in zip(Qfrob, Qp)]
    if any(c % p for c in E):
        raise SolverFailure("Frobenius discrepancy not divisible by p")
    powers = [[1]]
    for _ in range(1, K):
        powers.append(_kernels.poly_mul_mod(powers[-1], E, q))
    # multiplication by Q' = 3x^2 + a on Z/q[x]/(Q), basis 1, x, x^2
    cols = []
    for i in range(3):
        v = [0] * 5
        v[i] += at
        v[i + 2] += 3
        for k in (4, 3):
            c = v[k]
            if c:
                v[k - 2] -= c * at
                v[k - 3] -= c * bt
                v[k] = 0
        cols.append([v[0] % q, v[1] % q, v[2] % q])
    mat = [[cols[j][i] for j in range(3)] for i in range(3)]
    qp_inv = inverse_mod(mat, p, N)
    out = [[0, 0], [0, 0]]
    for j in (0, 1):
        forms = {}
        shift = p * j + p - 1
        for k in range(K):
            coeff = (p * _binom_half(k, q)) % q
            poly = [0] * shift + [(c * coeff) % q for c in powers[k]]
            forms[p * (2 * k + 1)] = poly
        c0, c1, e = _kernels.kedlaya_reduce(forms, at, bt, p, N, qp_inv)
        if e > N - 2:
            raise PrecisionError("working precision exhausted", slack=slack, loss=e, N=N)
        pe = p**e
        for i, c in enumerate((c0, c1)):
            if c % pe:
                raise PrecisionError("reduced form is not integral", slack=slack, loss=e)
            out[i][j] = (c // pe) % (p * p)
    return out


def frobenius_matrix(a_tilde: int, b_tilde: int, p: int, slack: int | None = None, validate: bool = True) -> FrobMatrix2:
    """Frobenius matrix of y^2 = x^3 + a~ x + b~ over Z/p^2.

    >>> m = frobenius_matrix(1, 0, 5)
    >>> m.trace, m.det
    (2, 5)
    """
    if p < 5:
        raise PrimeTooSmallError("the Frobenius matrix needs p >= 5", p=p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    q = p * p
    at, bt = a_tilde % q, b_tilde % q
    if (4 * at**3 + 27 * bt**2) % p == 0:
        raise SingularCurveError("curve is singular mod p", a=at % p, b=bt % p, p=p)
    slack = default_slack() if slack is None else slack
    if slack < 2:
        raise ValueError("slack must be at least 2")
    first = _raw_matrix(at, bt, p, slack)
    if validate:
        second = _raw_matrix(at, bt, p, slack + 1)
        if first != second:
            raise PrecisionError("results at slack and slack+1 disagree", slack=slack)
    return FrobMatrix2(p, at, bt, tuple(tuple(r) for r in first))


def point_count_ap(a: int, b: int, p: int) -> int:
    """a_p = p + 1 - #E(F_p) by counting with Euler's criterion.

    >>> point_count_ap(1, 0, 5)
    2
    """
    a %= p
    b %= p
    if (4 * a**3 + 27 * b**2) % p == 0:
        raise SingularCurveError("curve is singular", a=a, b=b, p=p)
    total = 0
    half = (p - 1) // 2
    for x in range(p):
        r = (x**3 + a * x + b) % p
        if r:
            total += 1 if pow(r, half, p) == 1 else -1
    return -total


def f1_preserved(m: FrobMatrix2) -> bool:
    return m.entries[1][0] % (m.p**2) == 0


def beta_scalar(m: FrobMatrix2) -> int:
    """beta with phi(dx/y) = p * beta * dx/y mod p^2."""
    if not f1_preserved(m):
        raise NotPreservedError("Frobenius does not preserve F^1", entry=m.entries[1][0])
    top = m.entries[0][0]
    if top % m.p:
        raise SolverFailure("Frobenius does not map F^1 into pH", entry=top)
    return (top // m.p) % m.p


def _matrix_job(args):
    at, bt, p, slack = args
    return frobenius_matrix(at, bt, p, slack=slack, validate=False)


def lift_matrices(a: int, b: int, p: int, workers: int | None = None, slack: int | None = None) -> list:
    """Frobenius matrices of all p^2 lifts (a + p s, b + p t), ordered by (s, t)."""
    slack = default_slack() if slack is None else slack
    a %= p
    b %= p
    jobs = [(a + p * s, b + p * t, p, slack) for s in range(p) for t in range(p)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_matrix_job, jobs, chunksize=4))
    return [_matrix_job(j) for j in jobs]


def enumerate_f1_lifts(a: int, b: int, p: int, workers: int | None = None, slack: int | None = None):
    """All lifts (a + p s, b + p t) of the curve whose Frobenius preserves F^1."""
    mats = lift_matrices(a, b, p, workers=workers, slack=slack)
    return sorted((m.a_tilde, m.b_tilde) for m in mats if f1_preserved(m))


def uniqueness_report(a: int, b: int, p: int, workers: int | None = None) -> dict:
    lifts = enumerate_f1_lifts(a, b, p, workers=workers)
    canon = weierstrass_canonical_lift(a, b, p)
    orbit = twist_orbit(canon.a_tilde, canon.b_tilde, p)
    return {
        "p": p,
        "a": a % p,
        "b": b % p,
        "candidates": p * p,
        "f1_lifts": [list(x) for x in lifts],
        "canonical": [canon.a_tilde, canon.b_tilde],
        "orbit": [list(x) for x in orbit],
        "single_orbit": [tuple(x) for x in lifts] == orbit,
        "contains_canonical": (canon.a_tilde, canon.b_tilde) in lifts,
    }
