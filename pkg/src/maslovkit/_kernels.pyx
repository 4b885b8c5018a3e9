# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fmod, M_PI

cnp.import_array()


def orthonormalize(frames):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] a = np.array(frames, dtype=np.float64, copy=True)
    if a.ndim != 3:
        raise ValueError("frames must have shape (N, d, k)")
    cdef Py_ssize_t nb = a.shape[0], d = a.shape[1], k = a.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] q = np.zeros_like(a)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ratio = np.full(nb, np.inf)
    cdef double[:, :, ::1] av = a
    cdef double[:, :, ::1] qv = q
    cdef double[::1] rv = ratio
    cdef Py_ssize_t b, i, j, l, p
    cdef double c, norm0, norm1, r
    for b in range(nb):
        for j in range(k):
            norm0 = 0.0
            for i in range(d):
                norm0 += av[b, i, j] * av[b, i, j]
            norm0 = sqrt(norm0)
            for p in range(2):
                for l in range(j):
                    c = 0.0
                    for i in range(d):
                        c += qv[b, i, l] * av[b, i, j]
                    for i in range(d):
                        av[b, i, j] -= c * qv[b, i, l]
            norm1 = 0.0
            for i in range(d):
                norm1 += av[b, i, j] * av[b, i, j]
            norm1 = sqrt(norm1)
            if norm1 > 0:
                for i in range(d):
                    qv[b, i, j] = av[b, i, j] / norm1
            r = norm1 / norm0 if norm0 > 0 else 0.0
            if r < rv[b]:
                rv[b] = r
        if k == 0:
            rv[b] = 1.0
    return q, ratio


def wrapped_increments(phases):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(phases, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef double x, two_pi = 2.0 * M_PI
    for i in range(m):
        x = p[(i + 1) % m] - p[i] + M_PI
        x = fmod(x, two_pi)
        if x < 0:
            x += two_pi
        x -= M_PI
        if x == -M_PI:
            x = M_PI
        out[i] = x
    return out


def left_chain(mats):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] m = np.ascontiguousarray(mats, dtype=np.float64)
    cdef Py_ssize_t count = m.shape[0], n = m.shape[1], s, i, j, l
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out = np.empty_like(m)
    cdef double acc
    if count == 0:
        return out
    out[0] = m[0]
    for s in range(1, count):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for l in range(n):
                    acc += m[s, i, l] * out[s - 1, l, j]
                out[s, i, j] = acc
    return out
