"""Reference implementation of the hot kernels in plain Python integers."""

from __future__ import annotations


def poly_mul_mod(a, b, q):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % q for c in out]


def sparse_mul_mod(ka, ca, kb, cb, q):
    """Product of sparse polynomials with exponents packed into integer keys."""
    out: dict = {}
    get = out.get
    bl = list(zip(kb, cb))
    for x, c in zip(ka, ca):
        if c % q == 0:
            continue
        for y, d in bl:
            k = x + y
            out[k] = get(k, 0) + c * d
    keys = []
    coeffs = []
    for k, c in out.items():
        c %= q
        if c:
            keys.append(k)
            coeffs.append(c)
    return keys, coeffs


def _split_p(d, p):
    v = 0
    while d % p == 0:
        d //= p
        v += 1
    return v, d


def kedlaya_reduce(forms, a, b, p, N, qp_inv):
    """Reduce sum R_s(x) dx/y^s to c0 dx/y + c1 x dx/y on y^2 = x^3 + a x + b.

    ``forms`` maps odd pole orders s to coefficient lists.  ``qp_inv`` is the
    3x3 inverse of multiplication by Q' on Z/p^N[x]/(Q).  Divisions by p are
    deferred: the return value is (c0, c1, e) with the true answer c/p^e.
    """
    q = p**N
    a %= q
    b %= q
    e = 0
    pe = 1
    smax = max(forms) if forms else 1
    R = []
    s = smax
    while s >= 3:
        add = forms.get(s)
        if add:
            if len(add) > len(R):
                R = R + [0] * (len(add) - len(R))
            for i, c in enumerate(add):
                R[i] = (R[i] + c * pe) % q
        while R and R[-1] == 0:
            R.pop()
        if R:
            # r = R mod Q, Q = x^3 + a x + b
            r = list(R)
            for k in range(len(r) - 1, 2, -1):
                c = r[k]
                if c:
                    r[k - 2] = (r[k - 2] - c * a) % q
                    r[k - 3] = (r[k - 3] - c * b) % q
                    r[k] = 0
            r = (r + [0, 0, 0])[:3]
            B = [sum(qp_inv[i][j] * r[j] for j in range(3)) % q for i in range(3)]
            # T = R - B * Q',  Q' = 3x^2 + a
            T = list(R) + [0] * max(0, 5 - len(R))
            for i, c in enumerate(B):
                if c:
                    T[i] = (T[i] - c * a) % q
                    T[i + 2] = (T[i + 2] - 3 * c) % q
            # A = T / Q exactly
            A = [0] * max(len(T) - 3, 0)
            for k in range(len(T) - 1, 2, -1):
                c = T[k] % q
                if c:
                    A[k - 3] = c
                    T[k - 2] = (T[k - 2] - c * a) % q
                    T[k - 3] = (T[k - 3] - c * b) % q
                    T[k] = 0
            if any(t % q for t in T[:3]):
                raise ArithmeticError("inexact division by Q")
            v, u = _split_p(s - 2, p)
            uinv = pow(u, -1, q)
            scale = p**v
            dB = [(2 * B[1] * uinv) % q, (4 * B[2] * uinv) % q]
            R = [(c * scale) % q for c in A]
            if len(R) < 2:
                R = R + [0] * (2 - len(R))
            R[0] = (R[0] + dB[0]) % q
            R[1] = (R[1] + dB[1]) % q
            e += v
            pe = (pe * scale) % q
        s -= 2
    add = forms.get(1)
    if add:
        if len(add) > len(R):
            R = R + [0] * (len(add) - len(R))
        for i, c in enumerate(add):
            R[i] = (R[i] + c * pe) % q
    while R and R[-1] == 0:
        R.pop()
    # x^(m+2) = -((2m+1) a x^m + 2 m b x^(m-1)) / (2m+3)
    for k in range(len(R) - 1, 1, -1):
        c = R[k]
        if not c:
            continue
        m = k - 2
        v, u = _split_p(2 * m + 3, p)
        cu = (c * pow(u, -1, q)) % q
        R[k] = 0
        if v:
            scale = p**v
            R = [(x * scale) % q for x in R]
            e += v
        R[m] = (R[m] - cu * (2 * m + 1) * a) % q
        if m >= 1:
            R[m - 1] = (R[m - 1] - cu * 2 * m * b) % q
    R = (R + [0, 0])[:2]
    return R[0], R[1], e
