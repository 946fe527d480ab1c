"""Grayscale frame loading: Netpbm parsing, square resampling, flattening.

Intensities are always stored as float64 in ``[0, 1]`` (raw sample divided by
``maxval``). Datasets are laid out as ``<root>/<label>/<frame>.{pgm,ppm,pnm}``.
"""
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyDataset, FormatError, NotSquare, UnsupportedMaxval

PNM_SUFFIXES = (".pgm", ".ppm", ".pnm")
LUMA = (0.299, 0.587, 0.114)
_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True)
class GrayImage:
    """A grayscale raster; ``pixels`` has shape ``(height, width)``."""

    pixels: np.ndarray
    maxval: int = 255

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64)
        if px.ndim != 2 or 0 in px.shape:
            raise FormatError(f"image must be a non-empty 2-D array, got shape {px.shape}")
        if not (1 <= self.maxval <= 65535):
            raise UnsupportedMaxval(f"maxval {self.maxval} outside 1..65535")
        if not np.all((px >= 0.0) & (px <= 1.0)):
            raise FormatError("intensities must lie in [0, 1]")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]


class _HeaderReader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def skip_space(self):
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos:self.pos + 1]
            if ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            elif ch in _WHITESPACE:
                self.pos += 1
            else:
                break

    def token(self, what):
        self.skip_space()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos:self.pos + 1] not in _WHITESPACE + b"#":
            self.pos += 1
        if start == self.pos:
            raise FormatError(f"truncated header: missing {what}")
        return data[start:self.pos]

    def integer(self, what):
        tok = self.token(what)
        if not tok.isdigit():
            raise FormatError(f"bad {what}: {tok[:20]!r}")
        return int(tok)


def read_pnm(data):
    """Decode P2/P5 graymaps and P3/P6 pixmaps into a :class:`GrayImage`.

    Pixmaps are reduced to luma (0.299 R + 0.587 G + 0.114 B) before scaling
    by ``maxval``. Samples wider than a byte are big-endian 16-bit.
    """
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise FormatError(f"bad magic {magic!r}; expected P2, P3, P5 or P6")
    header = _HeaderReader(data)
    header.pos = 2
    if header.pos < len(data) and data[2:3] not in _WHITESPACE + b"#":
        raise FormatError("magic must be followed by whitespace")
    width = header.integer("width")
    height = header.integer("height")
    maxval = header.integer("maxval")
    if width < 1 or height < 1:
        raise FormatError(f"invalid size {width}x{height}")
    if maxval > 65535:
        raise UnsupportedMaxval(f"maxval {maxval} exceeds 65535")
    if maxval < 1:
        raise FormatError("maxval must be at least 1")

    channels = 3 if magic in (b"P3", b"P6") else 1
    count = width * height * channels
    if magic in (b"P5", b"P6"):
        if header.pos >= len(data) or data[header.pos:header.pos + 1] not in _WHITESPACE:
            raise FormatError("missing whitespace after maxval")
        start = header.pos + 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(data) - start < need:
            raise FormatError(f"truncated raster: need {need} bytes, have {len(data) - start}")
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=start).astype(np.float64)
    else:
        raw = np.empty(count, dtype=np.float64)
        for i in range(count):
            try:
                raw[i] = header.integer("sample")
            except FormatError as exc:
                raise FormatError(f"sample {i} of {count}: {exc}") from None
    if raw.size and raw.max() > maxval:
        raise FormatError(f"sample value {int(raw.max())} exceeds maxval {maxval}")

    if channels == 3:
        rgb = raw.reshape(height, width, 3)
        raw = LUMA[0] * rgb[..., 0] + LUMA[1] * rgb[..., 1] + LUMA[2] * rgb[..., 2]
    pixels = np.clip(raw.reshape(height, width) / maxval, 0.0, 1.0)
    return GrayImage(pixels, maxval)


def write_pnm(img, binary=True):
    """Encode ``img`` as a P5 (``binary``) or P2 graymap at its own maxval."""
    raw = np.rint(img.pixels * img.maxval).astype(np.int64)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n{img.maxval}\n".encode("ascii")
    if not binary:
        rows = (" ".join(str(x) for x in row) for row in raw)
        return header + "\n".join(rows).encode("ascii") + b"\n"
    dtype = ">u2" if img.maxval > 255 else "u1"
    return header + raw.astype(dtype).tobytes()


def write_pixmap(rgb, maxval=255, binary=True):
    """Encode integer samples of shape ``(height, width, 3)`` as P6 or P3."""
    rgb = np.asarray(rgb, dtype=np.int64)
    height, width, _ = rgb.shape
    header = f"{'P6' if binary else 'P3'}\n{width} {height}\n{maxval}\n".encode("ascii")
    if not binary:
        return header + " ".join(str(x) for x in rgb.ravel()).encode("ascii") + b"\n"
    return header + rgb.astype(">u2" if maxval > 255 else "u1").tobytes()


def read_image(path):
    """Read a PNM file; format errors name the offending path."""
    path = Path(path)
    try:
        return read_pnm(path.read_bytes())
    except FormatError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _axis_weights(n_in, n_out):
    if n_out == 1:
        src = np.zeros(1)
    else:
        src = np.arange(n_out, dtype=np.float64) * (n_in - 1) / (n_out - 1)
    lo = np.minimum(np.floor(src).astype(np.int64), n_in - 1)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, src - lo


def _lerp(p0, p1, frac):
    # p0 + f*(p1 - p0) is exact for f == 0 and for p0 == p1; the clip removes
    # rounding overshoot so results stay inside [min(p0, p1), max(p0, p1)]
    out = p0 + frac * (p1 - p0)
    return np.clip(out, np.minimum(p0, p1), np.maximum(p0, p1))


def resize_bilinear(img, n):
    """Corner-aligned bilinear resampling of ``img`` to ``n`` x ``n``."""
    if n < 1:
        raise ValueError(f"target size must be >= 1, got {n}")
    px = img.pixels
    if px.shape == (n, n):
        return img
    y0, y1, fy = _axis_weights(img.height, n)
    x0, x1, fx = _axis_weights(img.width, n)
    rows = _lerp(px[y0, :], px[y1, :], fy[:, None])
    out = _lerp(rows[:, x0], rows[:, x1], fx[None, :])
    return GrayImage(out, img.maxval)


def flatten(img):
    """Row-major scan of a square image into a vector of length n*n."""
    if img.width != img.height:
        raise NotSquare(f"image is {img.width}x{img.height}")
    return img.pixels.ravel().copy()


def unflatten(vector, n, maxval=255):
    vector = np.asarray(vector, dtype=np.float64)
    if vector.size != n * n:
        raise NotSquare(f"vector of length {vector.size} is not {n}x{n}")
    return GrayImage(vector.reshape(n, n), maxval)


def load_vector(path, n):
    """Read, resize to ``n`` x ``n`` and flatten one frame."""
    return flatten(resize_bilinear(read_image(path), n))


@dataclass(frozen=True)
class LabeledSample:
    label: str
    source_path: str
    vector: np.ndarray

    def __post_init__(self):
        if not self.label:
            raise ValueError("label must be non-empty")
        vec = np.array(self.vector, dtype=np.float64)
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)


@dataclass(frozen=True)
class DatasetManifest:
    """Labeled image vectors in ``(label, source_path)`` order.

    ``n`` is the square side length the frames were resampled to; ``None``
    for corpora assembled directly from vectors.
    """

    samples: tuple
    n: int = None

    def __post_init__(self):
        samples = tuple(sorted(self.samples, key=lambda s: (s.label, s.source_path)))
        if not samples:
            raise EmptyDataset("dataset has no samples")
        length = samples[0].vector.size
        expected = length if self.n is None else self.n * self.n
        for s in samples:
            if s.vector.size != expected:
                raise FormatError(f"{s.source_path}: vector length {s.vector.size}, expected {expected}")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_vectors(cls, labels, vectors, n=None):
        samples = [LabeledSample(label, f"#{i}", vec) for i, (label, vec) in enumerate(zip(labels, vectors))]
        return cls(tuple(samples), n)

    @property
    def labels(self):
        return [s.label for s in self.samples]

    @property
    def vector_length(self):
        return self.samples[0].vector.size

    def matrix(self):
        """Image vectors stacked as columns (pixels x samples)."""
        return np.column_stack([s.vector for s in self.samples])

    def __len__(self):
        return len(self.samples)


def scan_dataset(root, n):
    """Load every frame under ``root``, labeling it by its subdirectory name.

    Files directly under ``root`` and files without a PNM suffix are ignored.
    """
    root = Path(root)
    if not root.is_dir():
        raise EmptyDataset(f"{root} is not a directory")
    samples = []
    for label in sorted(os.listdir(root)):
        label_dir = root / label
        if not label_dir.is_dir():
            continue
        for name in sorted(os.listdir(label_dir)):
            path = label_dir / name
            if path.suffix.lower() in PNM_SUFFIXES and path.is_file():
                samples.append(LabeledSample(label, str(path), load_vector(path, n)))
    if not samples:
        raise EmptyDataset(f"no {'/'.join(PNM_SUFFIXES)} frames under {root}")
    return DatasetManifest(tuple(samples), n)
