"""Dense univariate polynomials and rational functions over F_p.

Polynomials are coefficient lists, lowest degree first, with no trailing zeros.
"""

from __future__ import annotations


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def from_dict(d: dict, p: int):
    if not d:
        return []
    out = [0] * (max(d) + 1)
    for k, c in d.items():
        out[k] = c % p
    return trim(out)


def monomial(deg: int, p: int, coeff: int = 1):
    return trim([0] * deg + [coeff % p])


def add(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def neg(a, p):
    return [(-c) % p for c in a]


def sub(a, b, p):
    return add(a, neg(b, p), p)


def scale(a, c, p):
    return trim([(x * c) % p for x in a])


def mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([c % p for c in out])


def divmod_poly(a, b, p):
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = trim(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        c = (r[-1] * inv) % p
        q[shift] = c
        for i, y in enumerate(b):
            r[shift + i] = (r[shift + i] - c * y) % p
        r = trim(r)
    return trim(q), r


def gcd(a, b, p):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b, p)[1]
    if not a:
        return []
    return scale(a, pow(a[-1], -1, p), p)


def evaluate(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def derivative(a, p):
    return trim([(i * a[i]) % p for i in range(1, len(a))])


def shift(a, x0, p):
    """Coefficients of a(x0 + t) in t."""
    out = []
    for c in reversed(a):
        # out = out * (x0 + t) + c
        nxt = [0] * (len(out) + 1)
        for i, y in enumerate(out):
            nxt[i] += y * x0
            nxt[i + 1] += y
        nxt[0] += c
        out = [v % p for v in nxt]
    return trim(out)


# rational functions are pairs (num, den)


def rat_mul(r, s, p):
    return mul(r[0], s[0], p), mul(r[1], s[1], p)


def rat_add(r, s, p):
    return add(mul(r[0], s[1], p), mul(s[0], r[1], p), p), mul(r[1], s[1], p)


def rat_sub(r, s, p):
    return rat_add(r, (neg(s[0], p), s[1]), p)


def rat_normalize(r, p):
    """Cancel the gcd and make the denominator monic."""
    num, den = trim(r[0]), trim(r[1])
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return [], [1]
    g = gcd(num, den, p)
    num = divmod_poly(num, g, p)[0]
    den = divmod_poly(den, g, p)[0]
    inv = pow(den[-1], -1, p)
    return scale(num, inv, p), scale(den, inv, p)


def eval_rational(num, den, x, p):
    d = evaluate(den, x, p)
    if d == 0:
        raise ZeroDivisionError(f"pole at {x}")
    return (evaluate(num, x, p) * pow(d, -1, p)) % p


def rational_derivative(num, den, p):
    top = sub(mul(derivative(num, p), den, p), mul(num, derivative(den, p), p), p)
    return top, mul(den, den, p)


def rational_series(num, den, x0, D, p):
    """Coefficients c_0..c_D of num/den expanded in t = l - x0."""
    a = shift(num, x0, p)
    b = shift(den, x0, p)
    if not b or b[0] == 0:
        raise ZeroDivisionError(f"pole at {x0}")
    inv = pow(b[0], -1, p)
    out = []
    for n in range(D + 1):
        acc = a[n] if n < len(a) else 0
        for k in range(1, min(n, len(b) - 1) + 1):
            acc -= b[k] * out[n - k]
        out.append((acc * inv) % p)
    return out
