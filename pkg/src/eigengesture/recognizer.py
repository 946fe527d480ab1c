"""Nearest-neighbour recognition in weight space with a rejection threshold."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch
from .trainer import project_weights


@dataclass(frozen=True)
class Decision:
    """Outcome for one image.

    ``known`` is True when the nearest training weight vector lies within the
    model threshold; ``label`` and ``matched_index`` are then set. For
    unknown images ``distance`` is still the minimum distance found.
    """

    known: bool
    distance: float
    label: Optional[str] = None
    matched_index: Optional[int] = None

    @property
    def kind(self):
        return "KNOWN" if self.known else "UNKNOWN"


@dataclass(frozen=True)
class ConfusionTally:
    true_positive: int = 0
    true_negative: int = 0
    false_positive: int = 0
    false_negative: int = 0

    def __post_init__(self):
        if min(self.true_positive, self.true_negative, self.false_positive, self.false_negative) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self):
        return self.true_positive + self.true_negative + self.false_positive + self.false_negative


def recognize(model, image):
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 1 or image.size != model.n2:
        raise DimensionMismatch(f"image has shape {image.shape}, model expects ({model.n2},)")
    weights = project_weights(model.eigenimages, model.mean, image)
    j, dist = kernels.nearest_column(model.training_weights, weights)
    if dist <= model.threshold:
        return Decision(True, dist, model.labels[j], j)
    return Decision(False, dist)


def classify(decision, true_label, vocabulary):
    """Confusion cell (``"tp"``, ``"fp"``, ``"fn"`` or ``"tn"``) of one decision."""
    if decision.known:
        return "tp" if decision.label == true_label else "fp"
    return "fn" if true_label in vocabulary else "tn"


def evaluate(model, testset):
    """Recognize every sample of ``testset`` and tally the outcomes.

    Labels the model never saw count as negatives: rejecting them is a true
    negative.
    """
    vocabulary = set(model.labels)
    decisions = []
    counts = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    for sample in testset.samples:
        decision = recognize(model, sample.vector)
        decisions.append(decision)
        counts[classify(decision, sample.label, vocabulary)] += 1
    tally = ConfusionTally(counts["tp"], counts["tn"], counts["fp"], counts["fn"])
    return tally, decisions
