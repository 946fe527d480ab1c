"""Exception hierarchy.

Every failure the library reports derives from :class:`EigengestureError`,
grouped by the CLI exit code it maps to.
"""


class EigengestureError(Exception):
    """Base class for all library errors."""


# -- numeric / shape ---------------------------------------------------------

class DimensionMismatch(EigengestureError, ValueError):
    pass


class NotSymmetric(EigengestureError, ValueError):
    pass


class NoConvergence(EigengestureError, ArithmeticError):
    pass


class ZeroVector(EigengestureError, ValueError):
    pass


class NonFiniteValue(EigengestureError, ValueError):
    pass


# -- image / dataset input ---------------------------------------------------

class InputError(EigengestureError):
    """Problems reading images or dataset directories."""


class FormatError(InputError, ValueError):
    pass


class UnsupportedMaxval(FormatError):
    pass


class NotSquare(InputError, ValueError):
    pass


class EmptyDataset(InputError):
    pass


# -- training ----------------------------------------------------------------

class TrainingError(EigengestureError):
    """The corpus cannot produce a usable eigenspace."""


class TooFewSamples(TrainingError, ValueError):
    pass


class DegenerateTrainingSet(TrainingError):
    pass


# -- model files -------------------------------------------------------------

class ModelFileError(EigengestureError):
    """Base for EGSP load/save failures."""


class SinkFailure(ModelFileError, OSError):
    pass


class CorruptFile(ModelFileError):
    pass


class BadMagic(CorruptFile):
    pass


class UnsupportedVersion(CorruptFile):
    pass


class Truncated(CorruptFile):
    """The data ends before the payload its header declares."""
