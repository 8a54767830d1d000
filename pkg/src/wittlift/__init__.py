"""Canonical liftings mod p^2 from Frobenius splittings.

Submodules: ``exactring`` (exact polynomials and series over Z/p^k),
``witt2`` (length-2 Witt vectors), ``fsplit`` (Fedder test and splittings),
``canlift`` (canonical lifts), ``crysfrob`` (Frobenius on H^1_dR of elliptic
curves), ``frobord`` (multiplicative coordinates of Frobenius lifts),
``qfsplit`` (quasi-F-splittings and heights) and ``cli``.
"""

from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
