"""Point sets: in-memory representation, file formats, synthetic mixtures.

Binary layout (little-endian)::

    b"CVS1" | u32 n | u32 d | u8 has_labels | n*d float32 (row-major) | [n u32 labels]

CSV layout: one row per point, ``d`` float columns and an optional final
integer label column.

Randomness uses numpy's ``PCG64`` bit generator seeded directly with the
integer seed. PCG64 and the ``Generator`` sampling routines used here
(``choice`` with probabilities, ``standard_normal``) are platform independent,
so a given ``MixtureSpec`` produces the same floats on every machine.
"""

from __future__ import annotations

import csv
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from probcover.errors import EmbeddingFormatError, ValidationError

MAGIC = b"CVS1"
_HEADER = struct.Struct("<4sIIB")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """An ``n x d`` array of points with optional integer class labels.

    Arrays are copied on construction and marked read-only.
    """

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValidationError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValidationError(f"need n >= 1 and d >= 1, got shape {pts.shape}")
        bad = np.argwhere(~np.isfinite(pts))
        if len(bad):
            i, j = bad[0]
            raise ValidationError(f"non-finite coordinate at row {i}, column {j}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

        if self.labels is not None:
            raw = np.asarray(self.labels)
            if raw.ndim != 1 or raw.shape[0] != pts.shape[0]:
                raise ValidationError(
                    f"labels must have length {pts.shape[0]}, got shape {raw.shape}"
                )
            if raw.size and not np.all(raw == np.round(raw)):
                raise ValidationError("labels must be integers")
            lab = raw.astype(np.int64)
            if lab.size and lab.min() < 0:
                raise ValidationError(f"negative label {int(lab.min())}")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def num_classes(self) -> int:
        if self.labels is None:
            return 0
        return len(np.unique(self.labels))

    def subset(self, indices) -> "EmbeddingSet":
        idx = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[idx]
        return EmbeddingSet(self.points[idx], labels)

    def __eq__(self, other):
        if not isinstance(other, EmbeddingSet):
            return NotImplemented
        if self.points.shape != other.points.shape:
            return False
        if not np.array_equal(self.points, other.points):
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        return self.labels is None or np.array_equal(self.labels, other.labels)

    __hash__ = None


@dataclass(frozen=True)
class Component:
    mean: tuple[float, ...]
    stddev: float
    weight: float = 1.0
    label: int = 0


@dataclass(frozen=True)
class MixtureSpec:
    components: tuple[Component, ...]
    samples: int
    seed: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValidationError("mixture needs at least one component")
        if self.samples <= 0:
            raise ValidationError(f"samples must be positive, got {self.samples}")
        dims = {len(c.mean) for c in self.components}
        if len(dims) != 1 or 0 in dims:
            raise ValidationError(f"component means disagree on dimension: {sorted(dims)}")
        for i, c in enumerate(self.components):
            if not (c.stddev > 0 and math.isfinite(c.stddev)):
                raise ValidationError(f"component {i}: stddev must be > 0, got {c.stddev}")
            if not (c.weight > 0 and math.isfinite(c.weight)):
                raise ValidationError(f"component {i}: weight must be > 0, got {c.weight}")
            if c.label < 0:
                raise ValidationError(f"component {i}: negative class {c.label}")

    @property
    def dim(self) -> int:
        return len(self.components[0].mean)

    def weights(self) -> np.ndarray:
        w = np.array([c.weight for c in self.components], dtype=np.float64)
        return w / w.sum()


def sample_components(spec: MixtureSpec) -> np.ndarray:
    """Component index of every sample, exactly as ``generate_mixture`` draws them."""
    rng = make_rng(spec.seed)
    return rng.choice(len(spec.components), size=spec.samples, p=spec.weights())


def generate_mixture(spec: MixtureSpec) -> EmbeddingSet:
    """Sample an isotropic Gaussian mixture.

    One generator is seeded from ``spec.seed``; it first draws all component
    indices from the normalized weights, then an ``samples x dim`` block of
    standard normals which is scaled by each point's stddev and shifted by its
    mean.
    """
    rng = make_rng(spec.seed)
    comp = rng.choice(len(spec.components), size=spec.samples, p=spec.weights())
    noise = rng.standard_normal((spec.samples, spec.dim))
    means = np.array([c.mean for c in spec.components], dtype=np.float64)
    stds = np.array([c.stddev for c in spec.components], dtype=np.float64)
    labels = np.array([c.label for c in spec.components], dtype=np.int64)
    points = means[comp] + stds[comp, None] * noise
    return EmbeddingSet(points, labels[comp])


def ring_means(m: int, sep: float, dim: int = 2) -> list[tuple[float, ...]]:
    """``m`` means on a circle in the first two axes, adjacent ones ``sep`` apart."""
    if m == 1:
        return [tuple([0.0] * dim)]
    if dim < 2:
        return [tuple([i * sep] + [0.0] * (dim - 1)) for i in range(m)]
    radius = sep / (2 * math.sin(math.pi / m))
    out = []
    for i in range(m):
        a = 2 * math.pi * i / m
        out.append(tuple([radius * math.cos(a), radius * math.sin(a)] + [0.0] * (dim - 2)))
    return out


def normalize_l2(es: EmbeddingSet) -> EmbeddingSet:
    norms = np.linalg.norm(es.points, axis=1)
    zero = np.flatnonzero(norms == 0)
    if len(zero):
        raise ValidationError(f"row {int(zero[0])} has zero norm")
    return EmbeddingSet(es.points / norms[:, None], es.labels)


# ---------------------------------------------------------------- file formats


def _atomic_write(path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_binary(es: EmbeddingSet) -> bytes:
    has = es.labels is not None
    parts = [_HEADER.pack(MAGIC, es.n, es.d, int(has))]
    parts.append(es.points.astype("<f4").tobytes(order="C"))
    if has:
        parts.append(es.labels.astype("<u4").tobytes())
    return b"".join(parts)


def decode_binary(buf: bytes, source: str = "<bytes>") -> EmbeddingSet:
    if len(buf) < _HEADER.size:
        raise EmbeddingFormatError(
            f"{source}: truncated header at byte {len(buf)} (need {_HEADER.size} bytes)"
        )
    magic, n, d, has = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"{source}: bad magic {magic!r} at byte 0, expected {MAGIC!r}")
    if has not in (0, 1):
        raise EmbeddingFormatError(f"{source}: has_labels byte at offset 12 is {has}, expected 0 or 1")
    if n < 1 or d < 1:
        raise EmbeddingFormatError(f"{source}: header declares n={n}, d={d}; both must be >= 1")
    off = _HEADER.size
    expected = off + 4 * n * d + (4 * n if has else 0)
    if len(buf) != expected:
        raise EmbeddingFormatError(
            f"{source}: header n={n}, d={d}, has_labels={has} implies {expected} bytes "
            f"but payload ends at byte {len(buf)}"
        )
    pts = np.frombuffer(buf, dtype="<f4", count=n * d, offset=off).reshape(n, d)
    bad = np.flatnonzero(~np.isfinite(pts.ravel()))
    if len(bad):
        k = int(bad[0])
        raise EmbeddingFormatError(
            f"{source}: non-finite value at byte {off + 4 * k} (row {k // d}, column {k % d})"
        )
    labels = None
    if has:
        labels = np.frombuffer(buf, dtype="<u4", count=n, offset=off + 4 * n * d).astype(np.int64)
    return EmbeddingSet(pts.astype(np.float64), labels)


def _is_int_token(tok: str) -> bool:
    tok = tok.strip()
    if tok.startswith(("+", "-")):
        tok = tok[1:]
    return tok.isdigit()


def read_csv(path, header: bool = False, labels: bool | None = None, source: str | None = None):
    """Parse a CSV embedding file.

    ``labels=None`` treats the last column as labels iff every entry in it is
    an integer literal and there are at least two columns.
    """
    source = source or str(path)
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1 and header:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            rows.append((lineno, [c.strip() for c in row]))
    if not rows:
        raise EmbeddingFormatError(f"{source}: no data rows")
    width = len(rows[0][1])
    for lineno, row in rows:
        if len(row) != width:
            raise EmbeddingFormatError(
                f"{source}: line {lineno} has {len(row)} columns, expected {width}"
            )
    if labels is None:
        labels = width >= 2 and all(_is_int_token(r[-1]) for _, r in rows)
    d = width - 1 if labels else width
    if d < 1:
        raise EmbeddingFormatError(f"{source}: no coordinate columns")
    pts = np.empty((len(rows), d), dtype=np.float64)
    lab = np.empty(len(rows), dtype=np.int64) if labels else None
    for i, (lineno, row) in enumerate(rows):
        for j in range(d):
            try:
                v = float(row[j])
            except ValueError:
                raise EmbeddingFormatError(
                    f"{source}: line {lineno}, column {j + 1}: not a number: {row[j]!r}"
                ) from None
            if not math.isfinite(v):
                raise EmbeddingFormatError(
                    f"{source}: line {lineno}, column {j + 1}: non-finite value {row[j]!r}"
                )
            pts[i, j] = v
        if labels:
            tok = row[-1]
            if not _is_int_token(tok) or int(tok) < 0:
                raise EmbeddingFormatError(
                    f"{source}: line {lineno}, column {width}: bad label {tok!r}"
                )
            lab[i] = int(tok)
    return EmbeddingSet(pts, lab)


def encode_csv(es: EmbeddingSet) -> bytes:
    lines = []
    for i in range(es.n):
        cols = [repr(float(v)) for v in es.points[i]]
        if es.labels is not None:
            cols.append(str(int(es.labels[i])))
        lines.append(",".join(cols))
    return ("\n".join(lines) + "\n").encode()


def load_embeddings(path, format: str = "binary", csv_header: bool = False,
                    csv_labels: bool | None = None) -> EmbeddingSet:
    if format == "binary":
        with open(path, "rb") as fh:
            return decode_binary(fh.read(), str(path))
    if format == "csv":
        return read_csv(path, header=csv_header, labels=csv_labels)
    raise ValidationError(f"unknown format {format!r}")


def save_embeddings(es: EmbeddingSet, path, format: str = "binary"):
    if format == "binary":
        _atomic_write(path, encode_binary(es))
    elif format == "csv":
        _atomic_write(path, encode_csv(es))
    else:
        raise ValidationError(f"unknown format {format!r}")


def as_index_array(indices: Sequence[int], n: int, what: str = "index") -> np.ndarray:
    idx = np.asarray(list(indices), dtype=np.int64).reshape(-1)
    if idx.size:
        bad = idx[(idx < 0) | (idx >= n)]
        if bad.size:
            raise ValidationError(f"{what} {int(bad[0])} out of range [0, {n})")
    return idx
