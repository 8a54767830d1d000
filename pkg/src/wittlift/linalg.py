"""Dense linear algebra over Z/p and Z/p^N (unit pivots only)."""

from __future__ import annotations

__all__ = ["rref_mod_p", "nullspace_mod_p", "solve_mod_p", "inverse_mod", "rank_mod_p", "det_mod"]


def rref_mod_p(rows, p):
    """Row-reduce a copy of ``rows``; returns (matrix, pivot columns).

    Pivots are chosen left to right, first usable row, so the result is
    deterministic.
    """
    m = [[v % p for v in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(v * inv) % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_mod_p(rows, p) -> int:
    return len(rref_mod_p(rows, p)[1])


def nullspace_mod_p(rows, p, ncols=None):
    """Basis of {v : rows * v = 0}, one vector per free column (ascending)."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref_mod_p(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-m[i][f]) % p
        basis.append(v)
    return basis


def solve_mod_p(rows, rhs, p):
    """One solution of rows * v = rhs (free variables set to zero), or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref_mod_p(aug, p)
    if ncols in pivots:
        return None
    v = [0] * ncols
    for i, c in enumerate(pivots):
        v[c] = m[i][ncols]
    return v


def inverse_mod(mat, p, N=1):
    """Inverse of a square matrix over Z/p^N whose determinant is a unit."""
    q = p**N
    n = len(mat)
    m = [[v % q for v in r] + [int(i == j) for j in range(n)] for i, r in enumerate(mat)]
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] % p), None)
        if pr is None:
            raise ZeroDivisionError("matrix is singular mod p")
        m[c], m[pr] = m[pr], m[c]
        inv = pow(m[c][c], -1, q)
        m[c] = [(v * inv) % q for v in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % q for a, b in zip(m[i], m[c])]
    return [r[n:] for r in m]


def det_mod(mat, q):
    """Determinant by cofactor expansion (small matrices only)."""
    n = len(mat)
    if n == 0:
        return 1 % q
    if n == 1:
        return mat[0][0] % q
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * det_mod(minor, q)
    return total % q
