"""Numpy implementations of the hot loops, used when the extension is absent."""
import numpy as np


def orbit_moments(M, x, y, steps):
    """Apply ``M`` repeatedly to ``x`` and ``y``.

    Returns ``(s, a, b, x_last, y_last)`` where ``s[k] = <M^k x|M^k y>``,
    ``a[k] = |M^k x|^2`` and ``b[k] = |M^k y|^2`` for ``k = 0..steps``.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("orbit_moments needs a square operator")
    x = np.array(x, dtype=np.complex128)
    y = np.array(y, dtype=np.complex128)
    if x.shape != (M.shape[0],) or y.shape != (M.shape[0],):
        raise ValueError("vector length does not match operator")
    s = np.empty(steps + 1, dtype=np.complex128)
    a = np.empty(steps + 1)
    b = np.empty(steps + 1)
    for k in range(steps + 1):
        if k:
            x = M @ x
            y = M @ y
        s[k] = np.vdot(x, y)
        a[k] = np.vdot(x, x).real
        b[k] = np.vdot(y, y).real
    return s, a, b, x, y


def lemma_residuals(G, X, Y):
    """Both sides of the contraction inner-product inequality over a batch.

    ``G`` has shape ``(k, m, n)``, ``X`` and ``Y`` shape ``(k, n)``.
    """
    G = np.asarray(G, dtype=np.complex128)
    X = np.asarray(X, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    if X.shape != (G.shape[0], G.shape[2]) or Y.shape != X.shape:
        raise ValueError("batch shapes disagree")
    GX = np.einsum("kij,kj->ki", G, X)
    GY = np.einsum("kij,kj->ki", G, Y)
    xy = np.einsum("ki,ki->k", X.conj(), Y)
    gxy = np.einsum("ki,ki->k", GX.conj(), GY)
    xx = np.einsum("ki,ki->k", X.conj(), X).real
    yy = np.einsum("ki,ki->k", Y.conj(), Y).real
    gxx = np.einsum("ki,ki->k", GX.conj(), GX).real
    gyy = np.einsum("ki,ki->k", GY.conj(), GY).real
    return np.abs(xy - gxy) ** 2, (xx - gxx) * (yy - gyy)
