# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror ``_pykernels``."""
import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def orbit_moments(const double complex[:, ::1] M, x_in, y_in, Py_ssize_t steps):
    cdef Py_ssize_t d = M.shape[0]
    if M.shape[1] != d:
        raise ValueError("orbit_moments needs a square operator")
    cdef double complex[::1] x = np.array(x_in, dtype=np.complex128, copy=True)
    cdef double complex[::1] y = np.array(y_in, dtype=np.complex128, copy=True)
    if x.shape[0] != d or y.shape[0] != d:
        raise ValueError("vector length does not match operator")
    cdef double complex[::1] xt = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] yt = np.empty(d, dtype=np.complex128)
    s_arr = np.empty(steps + 1, dtype=np.complex128)
    a_arr = np.empty(steps + 1, dtype=np.float64)
    b_arr = np.empty(steps + 1, dtype=np.float64)
    cdef double complex[::1] s = s_arr
    cdef double[::1] a = a_arr
    cdef double[::1] b = b_arr
    cdef Py_ssize_t k, i, j
    cdef double complex accx, accy, sxy
    cdef double sxx, syy
    with nogil:
        for k in range(steps + 1):
            if k > 0:
                for i in range(d):
                    accx = 0
                    accy = 0
                    for j in range(d):
                        accx = accx + M[i, j] * x[j]
                        accy = accy + M[i, j] * y[j]
                    xt[i] = accx
                    yt[i] = accy
                for i in range(d):
                    x[i] = xt[i]
                    y[i] = yt[i]
            sxy = 0
            sxx = 0
            syy = 0
            for i in range(d):
                sxy = sxy + x[i].conjugate() * y[i]
                sxx = sxx + _abs2(x[i])
                syy = syy + _abs2(y[i])
            s[k] = sxy
            a[k] = sxx
            b[k] = syy
    return s_arr, a_arr, b_arr, np.asarray(x), np.asarray(y)


def lemma_residuals(const double complex[:, :, ::1] G,
                    const double complex[:, ::1] X,
                    const double complex[:, ::1] Y):
    cdef Py_ssize_t count = G.shape[0], m = G.shape[1], n = G.shape[2]
    if X.shape[0] != count or Y.shape[0] != count or X.shape[1] != n or Y.shape[1] != n:
        raise ValueError("batch shapes disagree")
    lhs_arr = np.empty(count, dtype=np.float64)
    rhs_arr = np.empty(count, dtype=np.float64)
    cdef double[::1] lhs = lhs_arr
    cdef double[::1] rhs = rhs_arr
    cdef Py_ssize_t k, i, j
    cdef double complex gx, gy, xy, gxy
    cdef double xx, yy, gxx, gyy
    with nogil:
        for k in range(count):
            xy = 0
            xx = 0
            yy = 0
            for j in range(n):
                xy = xy + X[k, j].conjugate() * Y[k, j]
                xx = xx + _abs2(X[k, j])
                yy = yy + _abs2(Y[k, j])
            gxy = 0
            gxx = 0
            gyy = 0
            for i in range(m):
                gx = 0
                gy = 0
                for j in range(n):
                    gx = gx + G[k, i, j] * X[k, j]
                    gy = gy + G[k, i, j] * Y[k, j]
                gxy = gxy + gx.conjugate() * gy
                gxx = gxx + _abs2(gx)
                gyy = gyy + _abs2(gy)
            lhs[k] = _abs2(xy - gxy)
            rhs[k] = (xx - gxx) * (yy - gyy)
    return lhs_arr, rhs_arr
