"""Kernel selection: the compiled module when importable, else pure Python.

Set ``WITTLIFT_PURE=1`` to force the fallback.
"""

import importlib
import os

from . import _pure

BACKEND = "pure"
_fast = None

if os.environ.get("WITTLIFT_PURE", "") not in ("1", "true", "yes"):
    try:
        _fast = importlib.import_module("._fast", __name__)
        BACKEND = "cython"
    except ImportError:
        _fast = None

# the compiled kernels use 64-bit arithmetic; they apply when q^2 fits
INT64_LIMIT = 1 << 62


def fits_int64(q: int) -> bool:
    return q * q * 8 < INT64_LIMIT


def kedlaya_reduce(forms, a, b, p, N, qp_inv):
    if _fast is not None and fits_int64(p**N):
        return _fast.kedlaya_reduce(forms, a, b, p, N, qp_inv)
    return _pure.kedlaya_reduce(forms, a, b, p, N, qp_inv)


def poly_mul_mod(a, b, q):
    if _fast is not None and fits_int64(q) and len(a) * len(b) > 64:
        return _fast.poly_mul_mod(a, b, q)
    return _pure.poly_mul_mod(a, b, q)


def sparse_mul_mod(ka, ca, kb, cb, q):
    if _fast is not None and fits_int64(q) and len(ka) * len(kb) > 64:
        return _fast.sparse_mul_mod(ka, ca, kb, cb, q)
    return _pure.sparse_mul_mod(ka, ca, kb, cb, q)
