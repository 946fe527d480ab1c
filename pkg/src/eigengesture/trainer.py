"""Eigenspace training with the reduced (M x M) covariance.

Pipeline: mean-center the image vectors into ``A`` (pixels x M), decompose
``A^T A`` instead of the pixels x pixels matrix ``A A^T``, keep the top-K
eigenvectors, lift them back to image space with ``U = A V`` and store every
training image's weight vector ``U^T (I - mean)`` plus a distance threshold.
"""
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ._backend import kernels
from .errors import DegenerateTrainingSet, DimensionMismatch, TooFewSamples, ZeroVector
from .linalg import EigenDecomposition, as_matrix, as_vector, column_mean, jacobi_eigh, unit_normalize

NORM_TOL = 1e-9
ORTHO_TOL = 1e-6


@dataclass(frozen=True)
class ExplicitK:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class EnergyFraction:
    fraction: float

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"energy fraction must be in (0, 1], got {self.fraction}")


KPolicy = Union[ExplicitK, EnergyFraction]


@dataclass(frozen=True)
class TrainConfig:
    n: Optional[int] = 64
    k_policy: KPolicy = field(default_factory=lambda: EnergyFraction(0.95))
    threshold_factor: float = 0.5
    eigen_drop_epsilon: float = 1e-12

    def __post_init__(self):
        if not (np.isfinite(self.threshold_factor) and self.threshold_factor > 0):
            raise ValueError(f"threshold factor must be finite and positive, got {self.threshold_factor}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"side length must be >= 1, got {self.n}")


def _readonly(arr):
    arr = np.array(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class EigenspaceModel:
    """A trained eigenspace.

    Attributes
    ----------
    mean : (n2,) array
        Average training image.
    eigenimages : (n2, k) array
        Unit-norm eigenimages, one per column, by decreasing eigenvalue.
    eigenvalues : (k,) array
        Matching eigenvalues of the (unscaled) covariance.
    labels : tuple of str
        Class of each training image.
    training_weights : (k, m) array
        Column ``j`` is the weight vector of training image ``j``.
    threshold : float
        Largest weight-space distance accepted as a match.
    """

    mean: np.ndarray
    eigenimages: np.ndarray
    eigenvalues: np.ndarray
    labels: tuple
    training_weights: np.ndarray
    threshold: float
    config: Optional[TrainConfig] = None

    def __post_init__(self):
        for name in ("mean", "eigenimages", "eigenvalues", "training_weights"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def n2(self):
        return self.mean.size

    @property
    def k(self):
        return self.eigenvalues.size

    @property
    def m(self):
        return len(self.labels)

    @property
    def side(self):
        """Square side length of the image vectors, or None when n2 is not a square."""
        side = int(round(self.n2 ** 0.5))
        return side if side * side == self.n2 else None

    def invariant_violations(self):
        """List of human-readable invariant failures (empty when the model is valid)."""
        problems = []
        n2, k, m = self.n2, self.k, self.m
        if self.mean.ndim != 1:
            problems.append("mean is not a vector")
        if self.eigenimages.shape != (n2, k):
            problems.append(f"eigenimages shape {self.eigenimages.shape} != {(n2, k)}")
        if self.training_weights.shape != (k, m):
            problems.append(f"training_weights shape {self.training_weights.shape} != {(k, m)}")
        if problems:
            return problems
        if m < 2:
            problems.append(f"needs at least 2 training images, has {m}")
        if not 1 <= k <= m - 1:
            problems.append(f"k={k} outside 1..m-1 (m={m})")
        for name in ("mean", "eigenimages", "eigenvalues", "training_weights"):
            if not np.all(np.isfinite(getattr(self, name))):
                problems.append(f"{name} has non-finite entries")
        if not (np.isfinite(self.threshold) and self.threshold >= 0.0):
            problems.append(f"threshold {self.threshold} is not a finite non-negative number")
        if np.any(self.eigenvalues <= 0.0):
            problems.append("eigenvalues must be strictly positive")
        if np.any(np.diff(self.eigenvalues) > 0.0):
            problems.append("eigenvalues are not non-increasing")
        if problems:
            return problems
        gram = self.eigenimages.T @ self.eigenimages
        if np.max(np.abs(np.diag(gram) - 1.0)) > 2 * NORM_TOL:
            problems.append("eigenimage columns are not unit norm")
        off = gram - np.diag(np.diag(gram))
        if off.size and np.max(np.abs(off)) > ORTHO_TOL:
            problems.append("eigenimage columns are not orthogonal")
        if any(not isinstance(lab, str) or not lab for lab in self.labels):
            problems.append("labels must be non-empty strings")
        return problems

    def __eq__(self, other):
        """Bit-exact comparison of every stored field (``config`` excluded)."""
        if not isinstance(other, EigenspaceModel):
            return NotImplemented
        arrays = ("mean", "eigenimages", "eigenvalues", "training_weights")
        return (
            self.labels == other.labels
            and np.float64(self.threshold).tobytes() == np.float64(other.threshold).tobytes()
            and all(
                getattr(self, a).shape == getattr(other, a).shape
                and getattr(self, a).tobytes() == getattr(other, a).tobytes()
                for a in arrays
            )
        )

    __hash__ = None


def normalize_training(manifest):
    """Return the mean image and ``A``, whose columns are the mean-centered images."""
    if len(manifest) < 2:
        raise TooFewSamples(f"need at least 2 training images, got {len(manifest)}")
    images = manifest.matrix()
    mean = column_mean(images)
    return mean, images - mean[:, None]


def small_covariance(a):
    """``A^T A`` (M x M). No 1/M factor: eigenvectors do not depend on it."""
    a = as_matrix(a, "a")
    return a.T @ a


def surviving_count(eigenvalues, eigen_drop_epsilon=1e-12):
    """How many leading eigenvalues exceed ``eigen_drop_epsilon * max``."""
    values = np.asarray(eigenvalues, dtype=np.float64)
    top = values[0] if values.size else 0.0
    if top <= 0.0:
        return 0
    return int(np.count_nonzero(values > eigen_drop_epsilon * top))


def lift_eigenvectors(a, decomp: EigenDecomposition, eigen_drop_epsilon=1e-12):
    """Map the small-covariance eigenvectors back to image space.

    Pairs with eigenvalue at or below ``eigen_drop_epsilon * lambda_max`` are
    dropped; every survivor becomes the unit, sign-normalized column ``A v``.
    """
    a = as_matrix(a, "a")
    if decomp.vectors.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"eigenvectors of length {decomp.vectors.shape[0]} for A with {a.shape[1]} columns")
    kept = surviving_count(decomp.values, eigen_drop_epsilon)
    if kept == 0:
        raise DegenerateTrainingSet("all eigenvalues are numerically zero; the images do not vary")
    lifted = a @ decomp.vectors[:, :kept]
    try:
        columns = [unit_normalize(lifted[:, i]) for i in range(kept)]
    except ZeroVector as exc:
        raise DegenerateTrainingSet(f"lifted eigenvector vanished: {exc}") from None
    return np.column_stack(columns)


def select_top_k(eigenvalues, policy):
    """Number of leading components to keep, between 1 and ``len(eigenvalues)``."""
    values = np.asarray(eigenvalues, dtype=np.float64)
    available = values.size
    if available == 0 or values[0] <= 0.0:
        raise DegenerateTrainingSet("no positive eigenvalue to select")
    if isinstance(policy, ExplicitK):
        k = policy.k
    else:
        energy = np.cumsum(values) / values.sum()
        hits = np.flatnonzero(energy >= policy.fraction)
        k = int(hits[0]) + 1 if hits.size else available
    return max(1, min(k, available))


def project_weights(eigenimages, mean, image):
    """Weight vector ``U^T (image - mean)``."""
    image = as_vector(image, "image")
    if image.size != mean.size or eigenimages.shape[0] != image.size:
        raise DimensionMismatch(f"image length {image.size}, model expects {eigenimages.shape[0]}")
    return eigenimages.T @ (image - mean)


def compute_threshold(training_weights, factor=0.5):
    """``factor`` times the largest distance between two training weight vectors."""
    weights = as_matrix(training_weights, "training_weights")
    if weights.shape[1] < 2:
        raise TooFewSamples("threshold needs at least 2 weight vectors")
    return factor * kernels.max_pairwise_distance(np.ascontiguousarray(weights))


@dataclass(frozen=True)
class TrainingReport:
    """Side information from a training run (not persisted with the model)."""

    all_eigenvalues: np.ndarray
    surviving: int
    energy: float
    sweeps: int


def train_with_report(manifest, config=None):
    config = config or TrainConfig()
    mean, a = normalize_training(manifest)
    decomp = jacobi_eigh(small_covariance(a))
    eigenimages = lift_eigenvectors(a, decomp, config.eigen_drop_epsilon)
    # mean-centering leaves rank <= M-1; a last survivor can only be rounding noise
    surviving = min(eigenimages.shape[1], len(manifest) - 1)
    values = decomp.values[:surviving]
    k = select_top_k(values, config.k_policy)
    eigenimages = eigenimages[:, :k]

    weights = np.column_stack([project_weights(eigenimages, mean, s.vector) for s in manifest.samples])
    model = EigenspaceModel(
        mean=mean,
        eigenimages=eigenimages,
        eigenvalues=values[:k],
        labels=tuple(manifest.labels),
        training_weights=weights,
        threshold=compute_threshold(weights, config.threshold_factor),
        config=config,
    )
    problems = model.invariant_violations()
    if problems:
        raise DegenerateTrainingSet("trained model is invalid: " + "; ".join(problems))
    report = TrainingReport(decomp.values, surviving, float(values[:k].sum() / values.sum()), decomp.sweeps)
    return model, report


def train(manifest, config=None):
    """Train an :class:`EigenspaceModel`; identical inputs give a bit-identical model."""
    return train_with_report(manifest, config)[0]


def reconstruct(model, weights):
    """Image vector ``mean + U w`` for a weight vector ``w``."""
    return model.mean + model.eigenimages @ np.asarray(weights, dtype=np.float64)
