# cython: boundscheck=False, wraparound=False, cdivision=True
"""64-bit versions of the kernels in ``_pure``; callers guarantee q^2 < 2^62."""

from libc.stdlib cimport malloc, free, calloc


cdef inline long long _md(long long x, long long q) nogil:
    x %= q
    return x + q if x < 0 else x


cdef long long _inv(long long u, long long q):
    return pow(int(u), -1, int(q))


def poly_mul_mod(a, b, long long q):
    cdef Py_ssize_t na = len(a), nb = len(b), i, j
    if na == 0 or nb == 0:
        return []
    cdef long long *x = <long long *> malloc(na * sizeof(long long))
    cdef long long *y = <long long *> malloc(nb * sizeof(long long))
    cdef long long *z = <long long *> calloc(na + nb - 1, sizeof(long long))
    cdef long long xi
    try:
        for i in range(na):
            x[i] = _md(a[i], q)
        for j in range(nb):
            y[j] = _md(b[j], q)
        for i in range(na):
            xi = x[i]
            if xi == 0:
                continue
            for j in range(nb):
                z[i + j] = (z[i + j] + xi * y[j]) % q
        return [z[i] for i in range(na + nb - 1)]
    finally:
        free(x)
        free(y)
        free(z)



cdef inline Py_ssize_t _slot(long long key, Py_ssize_t mask) nogil:
    cdef unsigned long long h = <unsigned long long> key * 0x9E3779B97F4A7C15ULL
    return <Py_ssize_t> ((h >> 17) & mask)


def sparse_mul_mod(ka, ca, kb, cb, long long q):
    """Product of sparse polynomials given as packed int64 exponent keys.

    Returns (keys, coeffs) of the nonzero terms, unordered.
    """
    cdef Py_ssize_t na = len(ka), nb = len(kb), i, j, s, cap = 64, filled = 0, mask, k
    if na == 0 or nb == 0:
        return [], []
    while cap < 2 * (na + nb):
        cap *= 2
    cdef long long *xa = <long long *> malloc(na * sizeof(long long))
    cdef long long *xc = <long long *> malloc(na * sizeof(long long))
    cdef long long *ya = <long long *> malloc(nb * sizeof(long long))
    cdef long long *yc = <long long *> malloc(nb * sizeof(long long))
    cdef long long *keys = <long long *> malloc(cap * sizeof(long long))
    cdef long long *vals = <long long *> calloc(cap, sizeof(long long))
    cdef long long *nk
    cdef long long *nv
    cdef long long key, c
    cdef Py_ssize_t oldcap
    try:
        for i in range(na):
            xa[i] = ka[i]
            xc[i] = _md(ca[i], q)
        for j in range(nb):
            ya[j] = kb[j]
            yc[j] = _md(cb[j], q)
        for s in range(cap):
            keys[s] = -1
        mask = cap - 1
        for i in range(na):
            c = xc[i]
            if c == 0:
                continue
            for j in range(nb):
                key = xa[i] + ya[j]
                s = _slot(key, mask)
                while keys[s] != -1 and keys[s] != key:
                    s = (s + 1) & mask
                if keys[s] == -1:
                    keys[s] = key
                    filled += 1
                vals[s] = (vals[s] + c * yc[j]) % q
                if 2 * filled > cap:
                    oldcap = cap
                    cap *= 2
                    mask = cap - 1
                    nk = <long long *> malloc(cap * sizeof(long long))
                    nv = <long long *> calloc(cap, sizeof(long long))
                    for k in range(cap):
                        nk[k] = -1
                    for k in range(oldcap):
                        if keys[k] != -1:
                            s = _slot(keys[k], mask)
                            while nk[s] != -1:
                                s = (s + 1) & mask
                            nk[s] = keys[k]
                            nv[s] = vals[k]
                    free(keys)
                    free(vals)
                    keys = nk
                    vals = nv
        out_k = []
        out_c = []
        for s in range(cap):
            if keys[s] != -1 and vals[s] != 0:
                out_k.append(keys[s])
                out_c.append(vals[s])
        return out_k, out_c
    finally:
        free(xa)
        free(xc)
        free(ya)
        free(yc)
        free(keys)
        free(vals)

cdef int _split_p(long long d, long long p, long long *u):
    cdef int v = 0
    while d % p == 0:
        d //= p
        v += 1
    u[0] = d
    return v


def kedlaya_reduce(forms, long long a, long long b, long long p, int N, qp_inv):
    cdef long long q = 1
    cdef int n
    for n in range(N):
        q *= p
    a = _md(a, q)
    b = _md(b, q)
    cdef long long M[3][3]
    cdef int i, j
    for i in range(3):
        for j in range(3):
            M[i][j] = _md(qp_inv[i][j], q)
    cdef int smax = max(forms) if forms else 1
    cdef Py_ssize_t cap = 8
    for s_, poly in forms.items():
        if len(poly) + 8 > cap:
            cap = len(poly) + 8
    cdef long long *R = <long long *> calloc(cap, sizeof(long long))
    cdef long long *A = <long long *> calloc(cap, sizeof(long long))
    cdef long long r[3]
    cdef long long B[3]
    cdef long long pe = 1, c, u, uinv, scale, cu
    cdef int e = 0, v, s, k, deg, m
    try:
        deg = -1
        s = smax
        while s >= 1:
            add = forms.get(s)
            if add:
                for k in range(len(add)):
                    R[k] = (R[k] + _md(add[k], q) * pe) % q
                if len(add) - 1 > deg:
                    deg = len(add) - 1
            while deg >= 0 and R[deg] == 0:
                deg -= 1
            if s < 3 or deg < 0:
                s -= 2
                continue
            # r = R mod Q
            for k in range(deg + 1):
                A[k] = R[k]
            for k in range(deg, 2, -1):
                c = A[k]
                if c:
                    A[k - 2] = _md(A[k - 2] - (c * a) % q, q)
                    A[k - 3] = _md(A[k - 3] - (c * b) % q, q)
                    A[k] = 0
            for i in range(3):
                r[i] = A[i] if i <= deg else 0
            for i in range(3):
                B[i] = ((M[i][0] * r[0]) % q + (M[i][1] * r[1]) % q + (M[i][2] * r[2]) % q) % q
            # T = R - B Q' stored in R (extend to degree >= 4)
            for k in range(deg + 1, 5):
                R[k] = 0
            if deg < 4:
                deg = 4
            for i in range(3):
                if B[i]:
                    R[i] = _md(R[i] - (B[i] * a) % q, q)
                    R[i + 2] = _md(R[i + 2] - (3 * B[i]) % q, q)
            # A = T / Q
            for k in range(deg + 1):
                A[k] = 0
            for k in range(deg, 2, -1):
                c = R[k]
                if c:
                    A[k - 3] = c
                    R[k - 2] = _md(R[k - 2] - (c * a) % q, q)
                    R[k - 3] = _md(R[k - 3] - (c * b) % q, q)
                    R[k] = 0
            if R[0] or R[1] or R[2]:
                raise ArithmeticError("inexact division by Q")
            v = _split_p(s - 2, p, &u)
            uinv = _inv(u % q, q)
            scale = 1
            for k in range(v):
                scale *= p
            for k in range(deg + 1):
                R[k] = (A[k] * scale) % q
            R[0] = (R[0] + (((2 * B[1]) % q) * uinv) % q) % q
            R[1] = (R[1] + (((4 * B[2]) % q) * uinv) % q) % q
            e += v
            pe = (pe * scale) % q
            s -= 2
        while deg >= 0 and R[deg] == 0:
            deg -= 1
        for k in range(deg, 1, -1):
            c = R[k]
            if not c:
                continue
            m = k - 2
            v = _split_p(2 * m + 3, p, &u)
            cu = (c * _inv(u % q, q)) % q
            R[k] = 0
            if v:
                scale = 1
                for i in range(v):
                    scale *= p
                for i in range(k):
                    R[i] = (R[i] * scale) % q
                e += v
            R[m] = _md(R[m] - (((cu * ((2 * m + 1) % q)) % q) * a) % q, q)
            if m >= 1:
                R[m - 1] = _md(R[m - 1] - (((cu * ((2 * m) % q)) % q) * b) % q, q)
        return R[0], R[1], e
    finally:
        free(R)
        free(A)
