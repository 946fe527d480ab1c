"""EGSP v1: the binary model file format.

Layout (all integers unsigned 32-bit little-endian, all reals little-endian
IEEE-754 doubles)::

    "EGSP"  version=1  n2  m  k                      20-byte header
    mean[n2]  eigenvalues[k]
    eigenimages[n2*k]       column-major
    training_weights[k*m]   column-major
    threshold
    m x (byte length, UTF-8 label)
    CRC32 of every preceding byte
"""
import os
import struct
import zlib

import numpy as np

from .errors import BadMagic, CorruptFile, SinkFailure, Truncated, UnsupportedVersion
from .trainer import EigenspaceModel

MAGIC = b"EGSP"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")
_U32 = struct.Struct("<I")
_F64 = np.dtype("<f8")


def encode_model(model):
    """Serialize ``model`` to EGSP bytes."""
    problems = model.invariant_violations()
    if problems:
        raise ValueError("refusing to save an invalid model: " + "; ".join(problems))
    parts = [
        _HEADER.pack(MAGIC, VERSION, model.n2, model.m, model.k),
        model.mean.astype(_F64).tobytes(),
        model.eigenvalues.astype(_F64).tobytes(),
        model.eigenimages.astype(_F64).tobytes(order="F"),
        model.training_weights.astype(_F64).tobytes(order="F"),
        np.array([model.threshold], dtype=_F64).tobytes(),
    ]
    for label in model.labels:
        raw = label.encode("utf-8")
        parts.append(_U32.pack(len(raw)))
        parts.append(raw)
    body = b"".join(parts)
    return body + _U32.pack(zlib.crc32(body))


def save_model(model, sink):
    """Write ``model`` to a binary stream or a path; returns the byte count."""
    data = encode_model(model)
    try:
        if isinstance(sink, (str, os.PathLike)):
            with open(sink, "wb") as fh:
                fh.write(data)
        else:
            written = sink.write(data)
            if written is not None and written != len(data):
                raise OSError(f"short write: {written} of {len(data)} bytes")
            flush = getattr(sink, "flush", None)
            if flush is not None:
                flush()
    except OSError as exc:
        raise SinkFailure(f"could not write model: {exc}") from exc
    return len(data)


class _Cursor:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, size, what):
        if self.pos + size > len(self.data):
            raise Truncated(f"file ends inside {what}")
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk

    def doubles(self, count, what):
        return np.frombuffer(self.take(8 * count, what), dtype=_F64).astype(np.float64)


def decode_model(data):
    """Parse EGSP bytes, verifying magic, version, checksum and model invariants."""
    data = bytes(data)
    if len(data) < 4:
        raise Truncated("file shorter than the magic number")
    if data[:4] != MAGIC:
        raise BadMagic(f"magic {data[:4]!r} is not {MAGIC!r}")
    if len(data) < _HEADER.size:
        raise Truncated("file ends inside the header")
    _, version, n2, m, k = _HEADER.unpack_from(data)
    if version != VERSION:
        raise UnsupportedVersion(f"EGSP version {version}; only {VERSION} is supported")
    declared = _HEADER.size + 8 * (n2 + k + n2 * k + k * m + 1) + 4 * m + _U32.size
    if len(data) < declared:
        raise Truncated(f"{len(data)} bytes, but the header (n2={n2}, m={m}, k={k}) needs at least {declared}")
    body, footer = data[:-4], data[-4:]
    if zlib.crc32(body) != _U32.unpack(footer)[0]:
        raise CorruptFile("CRC32 mismatch")

    cur = _Cursor(body)
    cur.pos = _HEADER.size
    try:
        mean = cur.doubles(n2, "mean")
        eigenvalues = cur.doubles(k, "eigenvalues")
        eigenimages = cur.doubles(n2 * k, "eigenimages").reshape((n2, k), order="F")
        weights = cur.doubles(k * m, "training weights").reshape((k, m), order="F")
        threshold = float(cur.doubles(1, "threshold")[0])
        labels = []
        for _ in range(m):
            (length,) = _U32.unpack(cur.take(4, "label length"))
            labels.append(cur.take(length, "label").decode("utf-8"))
    except Truncated as exc:
        # the checksum matched, so the header counts disagree with the payload
        raise CorruptFile(f"payload does not match header counts: {exc}") from None
    except UnicodeDecodeError as exc:
        raise CorruptFile(f"label is not UTF-8: {exc}") from None
    if cur.pos != len(body):
        raise CorruptFile(f"{len(body) - cur.pos} unexpected trailing bytes")

    model = EigenspaceModel(
        mean=np.ascontiguousarray(mean),
        eigenimages=np.ascontiguousarray(eigenimages),
        eigenvalues=eigenvalues,
        labels=tuple(labels),
        training_weights=np.ascontiguousarray(weights),
        threshold=threshold,
    )
    problems = model.invariant_violations()
    if problems:
        raise CorruptFile("invalid model: " + "; ".join(problems))
    return model


def load_model(source):
    """Read a model from a path, a binary stream or a bytes object."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    return decode_model(data)


def expected_size(n2, m, k, labels):
    """Byte size of an EGSP file with the given shape and labels."""
    label_bytes = sum(4 + len(lab.encode("utf-8")) for lab in labels)
    return _HEADER.size + 8 * (n2 + k + n2 * k + k * m + 1) + label_bytes + 4
