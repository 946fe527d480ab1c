# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; operation-for-operation twin of ``_kernels_py``."""
import numpy as np

from libc.math cimport fabs, sqrt

NAME = "cython"

cdef double _THETA_BIG = 1.0e150


cdef inline void _rotation(double app, double aqq, double apq,
                           double *t, double *c, double *s) nogil:
    cdef double theta = (aqq - app) / (2.0 * apq)
    cdef double tt
    if fabs(theta) > _THETA_BIG:
        tt = 1.0 / (2.0 * theta)
    else:
        tt = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
        if theta < 0.0:
            tt = -tt
    c[0] = 1.0 / sqrt(tt * tt + 1.0)
    s[0] = tt * c[0]
    t[0] = tt


def rotation(double app, double aqq, double apq):
    cdef double t, c, s
    _rotation(app, aqq, apq, &t, &c, &s)
    return t, c, s


def jacobi_sweep(double[:, ::1] a, double[:, ::1] v):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef double apq, app, aqq, t, c, s, xp, xq, np_, nq
    cdef long rotations = 0
    with nogil:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                _rotation(app, aqq, apq, &t, &c, &s)
                for r in range(n):
                    xp = a[r, p]
                    xq = a[r, q]
                    np_ = c * xp - s * xq
                    nq = s * xp + c * xq
                    a[r, p] = np_
                    a[r, q] = nq
                for r in range(n):
                    a[p, r] = a[r, p]
                    a[q, r] = a[r, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    xp = v[r, p]
                    xq = v[r, q]
                    v[r, p] = c * xp - s * xq
                    v[r, q] = s * xp + c * xq
                rotations += 1
    return rotations


cdef void _column_distances(const double[:, :] w, const double[:] x,
                            double[::1] out) nogil:
    cdef Py_ssize_t k = w.shape[0]
    cdef Py_ssize_t m = w.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc, d
    for j in range(m):
        acc = 0.0
        for i in range(k):
            d = w[i, j] - x[i]
            acc = acc + d * d
        out[j] = sqrt(acc)


def column_distances(const double[:, :] w, const double[:] x):
    out = np.empty(w.shape[1])
    cdef double[::1] view = out
    with nogil:
        _column_distances(w, x, view)
    return out


def nearest_column(const double[:, :] w, const double[:] x):
    cdef Py_ssize_t m = w.shape[1]
    cdef Py_ssize_t j, best_j = 0
    out = np.empty(m)
    cdef double[::1] d = out
    with nogil:
        _column_distances(w, x, d)
        for j in range(1, m):
            if d[j] < d[best_j]:
                best_j = j
    return int(best_j), float(d[best_j])


def max_pairwise_distance(const double[:, :] w):
    cdef Py_ssize_t k = w.shape[0]
    cdef Py_ssize_t m = w.shape[1]
    cdef Py_ssize_t i, j, l
    cdef double best = 0.0, acc, d
    with nogil:
        for j in range(m - 1):
            for l in range(j + 1, m):
                acc = 0.0
                for i in range(k):
                    d = w[i, l] - w[i, j]
                    acc = acc + d * d
                acc = sqrt(acc)
                if acc > best:
                    best = acc
    return best
