# cython: language_level=3
"""Compiled versions of the Monte Carlo hot kernels.

Same signatures and semantics as ``mimocap._fallback``. The per-trial
Hermitian solve uses an in-place Cholesky factorization, which is cheaper
than LAPACK dispatch for the 2..8 antenna sizes we care about.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, sin
from libc.stdint cimport uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t j) noexcept nogil:
    return (<double>(_mix64(key + (j + 1) * GOLDEN) >> 11) + 0.5) * INV_2_53


def mix64(z):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] flat = np.ascontiguousarray(z, dtype=np.uint64).ravel()
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty_like(flat)
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        out[i] = _mix64(flat[i])
    return out.reshape(np.shape(z))


def uniforms(keys, Py_ssize_t start, Py_ssize_t count):
    cdef const uint64_t[::1] k = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t n = k.shape[0]
    out = np.empty((n, count), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(n):
            for j in range(count):
                o[i, j] = _uniform(k[i], <uint64_t>(start + j))
    return out


def complex_normals(keys, Py_ssize_t start, Py_ssize_t count):
    cdef const uint64_t[::1] k = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t n = k.shape[0]
    out = np.empty((n, count), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double u1, u2, r, angle
    with nogil:
        for i in range(n):
            for j in range(count):
                u1 = _uniform(k[i], <uint64_t>(2 * (start + j)))
                u2 = _uniform(k[i], <uint64_t>(2 * (start + j) + 1))
                r = sqrt(-log(u1))
                angle = TWO_PI * u2
                o[i, j] = r * cos(angle) + 1j * (r * sin(angle))
    return out


cdef int _chol_solve(double complex* a, double complex* x, Py_ssize_t m) noexcept nogil:
    """In-place Cholesky of Hermitian ``a`` (row-major, lower used), then
    overwrite ``x`` with ``a^{-1} x``. Returns -1 if not positive definite."""
    cdef Py_ssize_t i, j, k
    cdef double d
    cdef double complex s
    for j in range(m):
        d = a[j * m + j].real
        for k in range(j):
            d -= a[j * m + k].real * a[j * m + k].real + a[j * m + k].imag * a[j * m + k].imag
        if d <= 0.0:
            return -1
        d = sqrt(d)
        a[j * m + j] = d
        for i in range(j + 1, m):
            s = a[i * m + j]
            for k in range(j):
                s -= a[i * m + k] * a[j * m + k].conjugate()
            a[i * m + j] = s / d
    # forward: L y = x
    for i in range(m):
        s = x[i]
        for k in range(i):
            s -= a[i * m + k] * x[k]
        x[i] = s / a[i * m + i].real
    # backward: L^H w = y
    for i in range(m - 1, -1, -1):
        s = x[i]
        for k in range(i + 1, m):
            s -= a[k * m + i].conjugate() * x[k]
        x[i] = s / a[i * m + i].real
    return 0


def mmse_solve(g0, h, p, noise):
    cdef const double complex[:, ::1] G = np.ascontiguousarray(g0, dtype=np.complex128)
    cdef const double complex[:, :, ::1] Hk = np.ascontiguousarray(h, dtype=np.complex128)
    cdef const double[:, ::1] P = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[::1] N0 = np.ascontiguousarray(noise, dtype=np.float64)
    cdef Py_ssize_t n = G.shape[0], m = G.shape[1], K = Hk.shape[2]
    out = np.empty((n, m), dtype=np.complex128)
    cdef double complex[:, ::1] W = out
    cdef double complex[:, ::1] a = np.empty((m, m), dtype=np.complex128)
    cdef Py_ssize_t t, i, j, k
    cdef double complex s
    cdef int status = 0
    with nogil:
        for t in range(n):
            for i in range(m):
                for j in range(i + 1):
                    s = 0.0
                    for k in range(K):
                        s += P[t, k] * Hk[t, i, k] * Hk[t, j, k].conjugate()
                    a[i, j] = s
                a[i, i] = a[i, i] + N0[t]
                W[t, i] = G[t, i]
            if _chol_solve(&a[0, 0], &W[t, 0], m) != 0:
                status = -1
                break
    if status != 0:
        raise np.linalg.LinAlgError("covariance is not positive definite")
    return out


def filter_sinr(w, g0, h, p):
    cdef const double complex[:, ::1] Wf = np.ascontiguousarray(w, dtype=np.complex128)
    cdef const double complex[:, ::1] G = np.ascontiguousarray(g0, dtype=np.complex128)
    cdef const double complex[:, :, ::1] Hk = np.ascontiguousarray(h, dtype=np.complex128)
    cdef const double[:, ::1] P = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t n = G.shape[0], m = G.shape[1], K = Hk.shape[2]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t t, i, k
    cdef double complex s
    cdef double den, wn
    with nogil:
        for t in range(n):
            s = 0.0
            wn = 0.0
            for i in range(m):
                s += Wf[t, i].conjugate() * G[t, i]
                wn += Wf[t, i].real * Wf[t, i].real + Wf[t, i].imag * Wf[t, i].imag
            o[t] = s.real * s.real + s.imag * s.imag
            den = wn
            for k in range(K):
                s = 0.0
                for i in range(m):
                    s += Wf[t, i].conjugate() * Hk[t, i, k]
                den += P[t, k] * (s.real * s.real + s.imag * s.imag)
            o[t] = o[t] / den
    return out
