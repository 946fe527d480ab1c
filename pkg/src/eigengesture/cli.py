"""Command-line interface: ``eigengesture {train,recognize,evaluate,bench,inspect}``.

Exit codes: 0 success (or KNOWN), 1 UNKNOWN, 2 usage error, 3 I/O or format
error, 4 training error.
"""
import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from ._backend import BACKEND
from .errors import EigengestureError, InputError, ModelFileError, NoConvergence, NotSymmetric, TrainingError
from .imageio import load_vector, scan_dataset
from .linalg import jacobi_eigh
from .metrics import compute_metrics, format_real
from .modelstore import MAGIC, VERSION, load_model, save_model
from .recognizer import evaluate, recognize
from .trainer import EnergyFraction, ExplicitK, TrainConfig, lift_eigenvectors, small_covariance, train_with_report

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_TRAINING = 4

#: largest pixel count for which ``bench --direct`` runs without ``--force``
DIRECT_GUARD_PIXELS = 1024


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text):
    value = float(text)
    if not (np.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be finite and > 0, got {text}")
    return value


def _fraction(text):
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in (0, 1], got {text}")
    return value


def build_parser():
    parser = _Parser(prog="eigengesture", description="PCA eigenspace recognizer for gesture frames.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train an eigenspace model from <dir>/<label>/<frame>.pgm")
    p.add_argument("--data", required=True, help="dataset root directory")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--size", type=_positive_int, default=64, help="square side length frames are resized to")
    k_group = p.add_mutually_exclusive_group()
    k_group.add_argument("--energy", type=_fraction, help="keep the fewest components carrying this eigenvalue share")
    k_group.add_argument("--k", type=_positive_int, help="keep exactly this many components (capped by rank)")
    p.add_argument("--threshold-factor", type=_positive_float, default=0.5,
                   help="threshold as a fraction of the largest training weight distance")

    p = sub.add_parser("recognize", help="recognize one frame")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)

    p = sub.add_parser("evaluate", help="recognize a labeled dataset and report metrics")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--json", action="store_true", help="print a JSON object instead of metric=value lines")

    p = sub.add_parser("bench", help="time the small-covariance path (and optionally the direct one)")
    p.add_argument("--pixels", type=_positive_int, required=True, help="pixels per synthetic image")
    p.add_argument("--images", type=_positive_int, required=True, help="number of synthetic images")
    p.add_argument("--direct", action="store_true", help="also decompose the pixels x pixels covariance")
    p.add_argument("--force", action="store_true", help=f"allow --direct above {DIRECT_GUARD_PIXELS} pixels")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("inspect", help="print the contents of a model file")
    p.add_argument("--model", required=True)
    return parser


def _cmd_train(args, out):
    policy = ExplicitK(args.k) if args.k is not None else EnergyFraction(args.energy or 0.95)
    config = TrainConfig(n=args.size, k_policy=policy, threshold_factor=args.threshold_factor)
    manifest = scan_dataset(args.data, args.size)
    model, report = train_with_report(manifest, config)
    size = save_model(model, args.out)
    print(f"m={model.m}", file=out)
    print(f"k={model.k}", file=out)
    print(f"energy={format_real(report.energy)}", file=out)
    print(f"threshold={format_real(model.threshold)}", file=out)
    print(f"eigenvalues={' '.join(format_real(v) for v in model.eigenvalues)}", file=out)
    print(f"wrote {size} bytes to {args.out}", file=out)
    return EXIT_OK


def _model_side(model):
    side = model.side
    if side is None:
        raise InputError(f"model pixel count {model.n2} is not a square image")
    return side


def _cmd_recognize(args, out):
    model = load_model(args.model)
    decision = recognize(model, load_vector(args.image, _model_side(model)))
    if decision.known:
        print(f"KNOWN {decision.label} distance={format_real(decision.distance)}", file=out)
        return EXIT_OK
    print(f"UNKNOWN distance={format_real(decision.distance)}", file=out)
    return EXIT_UNKNOWN


def _cmd_evaluate(args, out):
    model = load_model(args.model)
    testset = scan_dataset(args.data, _model_side(model))
    tally, _ = evaluate(model, testset)
    report = compute_metrics(tally)
    if args.json:
        print(report.to_json(), file=out)
    else:
        out.write(report.to_text())
    return EXIT_OK


def _timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def _cmd_bench(args, out):
    if args.direct and args.pixels > DIRECT_GUARD_PIXELS and not args.force:
        raise UsageError(
            f"refusing --direct with {args.pixels} pixels: the {args.pixels}x{args.pixels} covariance "
            f"is too large to decompose (limit {DIRECT_GUARD_PIXELS}; pass --force to override)"
        )
    rng = np.random.default_rng(args.seed)
    images = rng.random((args.pixels, args.images))
    a = images - images.mean(axis=1, keepdims=True)

    def trick():
        decomp = jacobi_eigh(small_covariance(a))
        return lift_eigenvectors(a, decomp)

    lifted, seconds = _timed(trick)
    print(f"backend={BACKEND}", file=out)
    print(f"small_covariance_dim={args.images}x{args.images}", file=out)
    print(f"small_covariance_seconds={format_real(seconds)}", file=out)
    print(f"components={lifted.shape[1]}", file=out)
    if args.direct:
        decomp, seconds = _timed(lambda: jacobi_eigh(a @ a.T))
        print(f"direct_covariance_dim={args.pixels}x{args.pixels}", file=out)
        print(f"direct_covariance_seconds={format_real(seconds)}", file=out)
    return EXIT_OK


def _cmd_inspect(args, out):
    model = load_model(args.model)
    print(f"magic={MAGIC.decode('ascii')}", file=out)
    print(f"version={VERSION}", file=out)
    print(f"n2={model.n2}", file=out)
    print(f"m={model.m}", file=out)
    print(f"k={model.k}", file=out)
    print(f"threshold={format_real(model.threshold)}", file=out)
    print(f"eigenvalues={' '.join(format_real(v) for v in model.eigenvalues)}", file=out)
    print(f"labels={json.dumps(list(model.labels))}", file=out)
    return EXIT_OK


_COMMANDS = {
    "train": _cmd_train,
    "recognize": _cmd_recognize,
    "evaluate": _cmd_evaluate,
    "bench": _cmd_bench,
    "inspect": _cmd_inspect,
}


def execute(argv=None, out=None, err=None):
    """Run one command and return its exit code; never raises for bad input."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.verb](args, out)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except (TrainingError, NoConvergence, NotSymmetric) as exc:
        print(f"training failed: {exc}", file=err)
        return EXIT_TRAINING
    except (InputError, ModelFileError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except EigengestureError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO


def main():
    sys.exit(execute())
