"""Eigenspace (PCA) recognition of gesture frames.

Typical use::

    from eigengesture import TrainConfig, scan_dataset, train, recognize

    model = train(scan_dataset("frames/", n=64), TrainConfig(n=64))
    decision = recognize(model, vector)
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .imageio import DatasetManifest, GrayImage, LabeledSample, flatten, read_pnm, resize_bilinear, scan_dataset
from .linalg import EigenDecomposition, euclidean_distance, jacobi_eigh
from .metrics import MetricsReport, compute_metrics
from .modelstore import load_model, save_model
from .recognizer import ConfusionTally, Decision, evaluate, recognize
from .trainer import EigenspaceModel, EnergyFraction, ExplicitK, TrainConfig, train

__all__ = [
    "BACKEND",
    "ConfusionTally",
    "DatasetManifest",
    "Decision",
    "EigenDecomposition",
    "EigenspaceModel",
    "EnergyFraction",
    "ExplicitK",
    "GrayImage",
    "LabeledSample",
    "MetricsReport",
    "TrainConfig",
    "compute_metrics",
    "euclidean_distance",
    "evaluate",
    "flatten",
    "jacobi_eigh",
    "load_model",
    "read_pnm",
    "recognize",
    "resize_bilinear",
    "save_model",
    "scan_dataset",
    "train",
]
