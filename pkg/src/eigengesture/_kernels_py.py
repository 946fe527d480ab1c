"""Pure-Python (numpy) kernels.

Reference implementation of the hot loops. ``_kernels_c.pyx`` performs the
same floating-point operations in the same order, so both backends give
bit-identical results; keep the two files in step.
"""
import math

import numpy as np

NAME = "python"

# beyond this |theta|, theta*theta may overflow; use the asymptotic tangent
_THETA_BIG = 1.0e150


def rotation(app, aqq, apq):
    """Return (t, c, s) of the Jacobi rotation annihilating ``apq``.

    A pivot tiny enough to overflow ``theta`` yields t == 0, the identity.
    """
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > _THETA_BIG:
        t = 1.0 / (2.0 * theta)
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    return t, c, s


def jacobi_sweep(a, v):
    """One cyclic sweep over the upper triangle, row-major pivot order.

    ``a`` (symmetric, n x n) and ``v`` (accumulated rotations) are C-contiguous
    float64 arrays updated in place. Returns the number of rotations applied.
    """
    with np.errstate(over="ignore"):
        return _sweep(a, v)


def _sweep(a, v):
    n = a.shape[0]
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            if apq == 0.0:
                continue
            app = a[p, p]
            aqq = a[q, q]
            t, c, s = rotation(app, aqq, apq)

            ap = a[:, p].copy()
            aq = a[:, q].copy()
            new_p = c * ap - s * aq
            new_q = s * ap + c * aq
            a[:, p] = new_p
            a[p, :] = new_p
            a[:, q] = new_q
            a[q, :] = new_q
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
            rotations += 1
    return rotations


def column_distances(w, x):
    """Euclidean distance from ``x`` (length k) to every column of ``w`` (k x m).

    Squares are accumulated row by row (sequentially in the component index).
    """
    k, m = w.shape
    acc = np.zeros(m)
    for i in range(k):
        d = w[i] - x[i]
        acc += d * d
    return np.sqrt(acc)


def nearest_column(w, x):
    """Index and distance of the column of ``w`` closest to ``x``; ties go to the lowest index."""
    d = column_distances(w, x)
    j = int(np.argmin(d))
    return j, float(d[j])


def max_pairwise_distance(w):
    """Largest Euclidean distance between any two columns of ``w``."""
    m = w.shape[1]
    best = 0.0
    for j in range(m - 1):
        d = column_distances(w[:, j + 1:], w[:, j])
        top = float(d.max())
        if top > best:
            best = top
    return best
