"""Dense complex linear algebra on finite-dimensional stages.

Vectors are 1-d ``complex128`` arrays and operators are 2-d ``complex128``
arrays of shape ``(out_dim, in_dim)``. Values returned by the helpers here
are read-only so they can be shared freely.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_TOL = 1e-9
GAP_CLAMP = 1e-10
SVD_MAX_DIM = 64
POWER_TOL = 1e-12
POWER_MAX_ITER = 10_000


class NotAContractionError(ValueError):
    """An operator required to be a contraction has norm above ``1 + tol``."""


def _freeze(a):
    a.flags.writeable = False
    return a


def as_vector(x, dim=None):
    """Coerce ``x`` to a read-only finite complex vector."""
    v = np.array(x, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return _freeze(v)


def as_operator(a, shape=None):
    """Coerce ``a`` to a read-only finite complex matrix."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or 0 in m.shape:
        raise ValueError(f"expected a non-empty 2-d operator, got shape {m.shape}")
    if shape is not None and m.shape != tuple(shape):
        raise ValueError(f"operator shape {m.shape} does not match {tuple(shape)}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    return _freeze(m)


def identity(dim):
    return _freeze(np.eye(dim, dtype=np.complex128))


def basis_vector(dim, k):
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return _freeze(e)


def inner(x, y):
    """``<x|y>``, conjugate-linear in ``x``."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def norm(x):
    return float(np.linalg.norm(x))


def adjoint(G):
    return _freeze(np.conj(np.asarray(G, dtype=np.complex128)).T.copy())


def spectral_norm_power(G, tol=POWER_TOL, max_iter=POWER_MAX_ITER, seed=0):
    """Largest singular value by power iteration on ``G^H G``.

    The start vector is drawn from a fixed seed so results are reproducible.
    """
    G = np.asarray(G, dtype=np.complex128)
    if not np.any(G):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(G.shape[1]) + 1j * rng.standard_normal(G.shape[1])
    v /= np.linalg.norm(v)
    GH = G.conj().T
    sigma = 0.0
    for _ in range(max_iter):
        w = GH @ (G @ v)
        lam = np.linalg.norm(w)
        if lam == 0.0:
            # start vector landed in the kernel; restart along a column
            v = GH[:, np.argmax(np.linalg.norm(GH, axis=0))].copy()
            v /= np.linalg.norm(v)
            continue
        v = w / lam
        new_sigma = float(np.sqrt(lam))
        if abs(new_sigma - sigma) <= tol * new_sigma:
            sigma = new_sigma
            break
        sigma = new_sigma
    return float(np.linalg.norm(G @ v))


def operator_norm(G):
    """Spectral norm: full SVD up to 64 rows/columns, power iteration above."""
    G = np.asarray(G, dtype=np.complex128)
    if max(G.shape) <= SVD_MAX_DIM:
        return float(np.linalg.svd(G, compute_uv=False)[0])
    return spectral_norm_power(G)


class OperatorKind(str, enum.Enum):
    ISOMETRY = "isometry"
    CONTRACTION = "contraction"
    BOUNDED = "bounded"


# Stricter categories come first.
CATEGORY_ORDER = (OperatorKind.ISOMETRY, OperatorKind.CONTRACTION, OperatorKind.BOUNDED)


def within_category(kind, category):
    """Whether an operator of ``kind`` belongs to ``category``."""
    return CATEGORY_ORDER.index(OperatorKind(kind)) <= CATEGORY_ORDER.index(OperatorKind(category))


@dataclass(frozen=True)
class OperatorClass:
    tag: OperatorKind
    norm: float


def classify(G, tol=DEFAULT_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    G = np.asarray(G, dtype=np.complex128)
    nrm = operator_norm(G)
    gram = G.conj().T @ G
    if np.max(np.abs(gram - np.eye(G.shape[1]))) <= tol:
        return OperatorClass(OperatorKind.ISOMETRY, nrm)
    if nrm <= 1.0 + tol:
        return OperatorClass(OperatorKind.CONTRACTION, nrm)
    return OperatorClass(OperatorKind.BOUNDED, nrm)


def require_contraction(G, tol=DEFAULT_TOL):
    cls = classify(G, tol)
    if cls.tag is OperatorKind.BOUNDED:
        raise NotAContractionError(f"operator norm {cls.norm!r} exceeds 1 + {tol}")
    return cls


def kronecker(A, B):
    return _freeze(np.kron(np.asarray(A, dtype=np.complex128), np.asarray(B, dtype=np.complex128)))


def _gap_unchecked(G, x):
    x = np.asarray(x, dtype=np.complex128)
    Gx = np.asarray(G) @ x
    g = np.vdot(x, x).real - np.vdot(Gx, Gx).real
    if g < 0:
        if g < -GAP_CLAMP * max(1.0, np.vdot(x, x).real):
            raise NotAContractionError(f"negative gap {g!r}: operator expands x")
        g = 0.0
    return float(g)


def gap(G, x, tol=DEFAULT_TOL):
    """``<x|x> - <Gx|Gx>`` for a contraction ``G``, clamped at zero for roundoff."""
    require_contraction(G, tol)
    return _gap_unchecked(G, x)


def lemma_check(G, x, y, tol=DEFAULT_TOL):
    """Compare ``|<x|y> - <Gx|Gy>|^2`` against ``gap(G, x) * gap(G, y)``.

    Returns ``(lhs, rhs, holds)``.
    """
    require_contraction(G, tol)
    G = np.asarray(G, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    lhs = abs(inner(x, y) - inner(G @ x, G @ y)) ** 2
    rhs = _gap_unchecked(G, x) * _gap_unchecked(G, y)
    return lhs, rhs, bool(lhs <= rhs + tol)


def lemma_residuals(G, X, Y):
    """Batched ``(lhs, rhs)`` of the lemma inequality; see ``kernels``."""
    return kernels.lemma_residuals(
        np.ascontiguousarray(G, dtype=np.complex128),
        np.ascontiguousarray(X, dtype=np.complex128),
        np.ascontiguousarray(Y, dtype=np.complex128),
    )


def _gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_contractions(out_dim, in_dim, count, rng):
    """A ``(count, out_dim, in_dim)`` stack of random contractions.

    Complex Gaussian entries with variance ``1/max(out_dim, in_dim)`` have
    their singular values clipped to ``[0, 1]``.
    """
    if out_dim < 1 or in_dim < 1:
        raise ValueError("dimensions must be positive")
    A = _gaussian(rng, (count, out_dim, in_dim)) / np.sqrt(max(out_dim, in_dim))
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    s = np.clip(s, 0.0, 1.0)
    return (U * s[:, None, :]) @ Vh


def random_contraction(out_dim, in_dim, seed):
    """Deterministic random contraction for a given seed."""
    rng = np.random.default_rng(seed)
    return _freeze(random_contractions(out_dim, in_dim, 1, rng)[0].copy())


def random_vector(dim, rng):
    return _freeze(_gaussian(rng, dim))


def random_isometry(out_dim, in_dim, rng):
    if out_dim < in_dim:
        raise ValueError("an isometry needs out_dim >= in_dim")
    Q, R = np.linalg.qr(_gaussian(rng, (out_dim, in_dim)))
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return _freeze(Q)
