# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops; see ``_fallback`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, floor

cnp.import_array()

ctypedef double complex cplx

cdef double SERIES_CUT = 1e-3


cdef inline double cabs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


def j0_double_sum(cplx[::1] w, cplx[:, ::1] A, cplx[:, ::1] B, cplx[:, ::1] g,
                  cplx[:, ::1] G, cplx[:, ::1] d, double[::1] da, idx):
    cdef Py_ssize_t n = w.shape[0], M = da.shape[0]
    cdef Py_ssize_t i, j, k, s
    cdef bint uniform = idx is None
    cdef long long[:, ::1] ix
    if not uniform:
        ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef cplx[:, ::1] EA = np.exp(np.asarray(A))
    cdef cplx[:, ::1] EB = np.exp(np.asarray(B))
    cdef cplx total = 0, acc, z, gam, wt, ek, ek1
    cdef double cut2 = SERIES_CUT * SERIES_CUT
    with nogil:
        for i in range(n):
            for j in range(i, n):
                s = i + j if uniform else ix[i, j]
                acc = 0
                ek = EA[0, i] * EA[0, j] * EB[0, s]
                for k in range(M):
                    ek1 = EA[k + 1, i] * EA[k + 1, j] * EB[k + 1, s]
                    gam = G[k, s] - g[k, i] - g[k, j] - d[k, i] * d[k, j] * da[k]
                    if gam.real != 0 or gam.imag != 0:
                        z = (A[k + 1, i] - A[k, i]) + (A[k + 1, j] - A[k, j]) + (B[k + 1, s] - B[k, s])
                        if cabs2(z) < cut2:
                            wt = ek * (1 + z * (0.5 + z * (1.0 / 6 + z / 24)))
                        else:
                            wt = (ek1 - ek) / z
                        acc = acc + gam * wt
                    ek = ek1
                acc = acc * w[i] * w[j]
                total = total + (acc if i == j else 2 * acc)
    return complex(total), n * (n + 1) // 2


cdef inline double interp_uniform(const double* row, Py_ssize_t m, double x0, double dx,
                                  double x) noexcept nogil:
    cdef double pos = (x - x0) / dx
    cdef Py_ssize_t j = <Py_ssize_t> floor(pos)
    if j < 0:
        j = 0
    elif j > m - 2:
        j = m - 2
    cdef double f = pos - j
    return row[j] * (1 - f) + row[j + 1] * f


def hedge_table(double[:, ::1] X, double[::1] alpha, double H0, double[::1] fT, double x0,
                double dx, double[:, ::1] Htab, double[:, ::1] Ktab, bint feedback):
    cdef Py_ssize_t P = X.shape[0], N = X.shape[1] - 1, m = Ktab.shape[1], p, k
    out = np.empty(P)
    gains_arr = np.zeros(P)
    cdef double[::1] o = out
    cdef double[::1] gains = gains_arr
    cdef const double* hrow
    cdef const double* krow
    cdef double x, v
    with nogil:
        # time-major so each table row stays in cache across paths
        for k in range(N):
            hrow = &Htab[k, 0]
            krow = &Ktab[k, 0]
            for p in range(P):
                x = X[p, k]
                v = interp_uniform(krow, m, x0, dx, x)
                if feedback:
                    v = v + alpha[k] * (interp_uniform(hrow, m, x0, dx, x) - H0 - gains[p])
                gains[p] = gains[p] + v * (X[p, k + 1] - x)
        for p in range(P):
            o[p] = fT[p] - H0 - gains[p]
    return out


def hedge_atoms(double[:, ::1] X, double[::1] alpha, double H0, double[::1] fT, double[::1] u,
                cplx[:, ::1] Hcoef, cplx[:, ::1] Kcoef, bint feedback):
    cdef Py_ssize_t P = X.shape[0], N = X.shape[1] - 1, m = u.shape[0], p, k, j
    out = np.empty(P)
    cdef double[::1] o = out
    cdef double gains, x, v, h, c, sn
    with nogil:
        for p in range(P):
            gains = 0
            for k in range(N):
                x = X[p, k]
                v = 0
                h = 0
                for j in range(m):
                    c = cos(u[j] * x)
                    sn = sin(u[j] * x)
                    v = v + Kcoef[k, j].real * c - Kcoef[k, j].imag * sn
                    if feedback:
                        h = h + Hcoef[k, j].real * c - Hcoef[k, j].imag * sn
                if feedback:
                    v = v + alpha[k] * (h - H0 - gains)
                gains = gains + v * (X[p, k + 1] - x)
            o[p] = fT[p] - H0 - gains
    return out
