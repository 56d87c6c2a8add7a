"""Kernel dispatch: the compiled extension when built, numpy otherwise.

Set ``HILBCOLIM_PURE=1`` to force the numpy path.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("HILBCOLIM_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"


def _c128(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def orbit_moments(M, x, y, steps):
    return _impl.orbit_moments(_c128(M), _c128(x), _c128(y), int(steps))


def lemma_residuals(G, X, Y):
    return _impl.lemma_residuals(_c128(G), _c128(X), _c128(Y))


__all__ = ["BACKEND", "orbit_moments", "lemma_residuals"]
