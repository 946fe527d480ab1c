"""Dense float64 linear algebra used by the eigenspace pipeline.

Vectors and matrices are plain ``numpy.ndarray`` objects (1-D and 2-D,
``float64``); :func:`as_vector` and :func:`as_matrix` validate them. The
symmetric eigensolver is a cyclic Jacobi method whose rotation sweeps run in
the kernel selected by :mod:`eigengesture._backend`.
"""
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch, NoConvergence, NonFiniteValue, NotSymmetric, ZeroVector

#: entries at or below this magnitude are skipped when fixing eigenvector signs
SIGN_EPS = 1e-12
JACOBI_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-9


def _frozen(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


def as_vector(values, name="vector"):
    """Return ``values`` as a finite, non-empty 1-D float64 array."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return v


def as_matrix(values, name="matrix"):
    """Return ``values`` as a finite 2-D float64 array with no empty axis."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return m


def mat_mul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def column_mean(m):
    """Mean of the columns of ``m``: element ``j`` is the average of row ``j``."""
    m = as_matrix(m)
    return m.mean(axis=1)


def euclidean_distance(a, b):
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"length {a.size} vs {b.size}")
    return float(kernels.column_distances(a[:, None], b)[0])


def sign_normalize(v):
    """Flip ``v`` so its first entry with magnitude above ``SIGN_EPS`` is positive."""
    v = np.array(v, dtype=np.float64)
    significant = np.flatnonzero(np.abs(v) > SIGN_EPS)
    if significant.size and v[significant[0]] < 0.0:
        v = -v
    return v


def unit_normalize(v):
    v = as_vector(v)
    norm = float(np.linalg.norm(v))
    if norm <= SIGN_EPS:
        raise ZeroVector(f"cannot normalize a vector of norm {norm:.3g}")
    return sign_normalize(v / norm)


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a symmetric matrix, sorted by eigenvalue descending.

    ``vectors[:, i]`` is the unit eigenvector belonging to ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "vectors", _frozen(self.vectors))

    @property
    def source_dim(self):
        return self.values.size

    @property
    def pairs(self):
        return [EigenPair(float(lam), self.vectors[:, i]) for i, lam in enumerate(self.values)]

    def __len__(self):
        return self.values.size


def _off_diagonal_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(c, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decompose a symmetric matrix with cyclic Jacobi rotations.

    Sweeps visit the upper triangle in row-major order until the off-diagonal
    Frobenius norm is at most ``tol`` times the Frobenius norm of the input,
    followed by one polishing sweep unless the matrix is already diagonal.
    Eigenvectors are sign-normalized with :func:`sign_normalize`;
    equal eigenvalues keep their diagonal order.

    Raises
    ------
    NotSymmetric
        If ``c`` is not square or differs from its transpose by more than
        ``1e-9`` relative to its largest entry.
    NoConvergence
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    c = as_matrix(c, "c")
    n, cols = c.shape
    if n != cols:
        raise NotSymmetric(f"matrix must be square, got {c.shape}")
    asym = float(np.max(np.abs(c - c.T)))
    if asym > SYMMETRY_TOL * float(np.max(np.abs(c))):
        raise NotSymmetric(f"max |c - c^T| = {asym:.3g}")

    a = np.ascontiguousarray(0.5 * (c + c.T))
    v = np.eye(n)
    target = tol * float(np.linalg.norm(a))
    sweeps = 0
    off = _off_diagonal_norm(a)
    while off > target:
        if sweeps == max_sweeps:
            raise NoConvergence(f"off-diagonal norm still above {target:.3g} after {max_sweeps} sweeps")
        kernels.jacobi_sweep(a, v)
        sweeps += 1
        off = _off_diagonal_norm(a)
    if off > 0.0:
        # the tolerance bounds residuals by tol*||c|| only, too loose for small
        # eigenvalues; convergence is quadratic, so one more sweep reaches rounding level
        kernels.jacobi_sweep(a, v)
        sweeps += 1

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    vectors = np.empty_like(v)
    for dst, src in enumerate(order):
        vectors[:, dst] = sign_normalize(v[:, src])
    return EigenDecomposition(values[order], vectors, sweeps)
