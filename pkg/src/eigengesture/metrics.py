"""Accuracy, recall, precision and prevalence from a confusion tally.

A metric whose denominator is zero is reported as ``None`` (printed as
``undefined``) rather than coerced to 0 or 1.
"""
import json
from dataclasses import dataclass
from typing import Optional

from .recognizer import ConfusionTally


def _ratio(num, den):
    return num / den if den else None


@dataclass(frozen=True)
class MetricsReport:
    tally: ConfusionTally
    accuracy: Optional[float]
    recall: Optional[float]
    precision: Optional[float]
    prevalence: Optional[float]

    def as_dict(self):
        t = self.tally
        return {
            "tp": t.true_positive,
            "tn": t.true_negative,
            "fp": t.false_positive,
            "fn": t.false_negative,
            "total": t.total,
            "accuracy": self.accuracy,
            "recall": self.recall,
            "precision": self.precision,
            "prevalence": self.prevalence,
        }

    def to_text(self):
        """One ``metric=value`` line per field; reals use 17 significant digits."""
        lines = []
        for key, value in self.as_dict().items():
            if value is None:
                text = "undefined"
            elif isinstance(value, float):
                text = format_real(value)
            else:
                text = str(value)
            lines.append(f"{key}={text}")
        return "\n".join(lines) + "\n"

    def to_json(self):
        return json.dumps(self.as_dict())


def format_real(x):
    return f"{x:.17g}"


def compute_metrics(tally):
    tp, tn = tally.true_positive, tally.true_negative
    fp, fn = tally.false_positive, tally.false_negative
    total = tally.total
    return MetricsReport(
        tally=tally,
        accuracy=_ratio(tp + tn, total),
        recall=_ratio(tp, tp + fn),
        precision=_ratio(tp, tp + fp),
        prevalence=_ratio(tp + fn, total),
    )
