"""Core types: embedding sequences, monotone alignments and frame metrics."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import AlignmentIndexError, DimensionError, LengthError, ValidationError

__all__ = [
    "EmbeddingSequence",
    "Alignment",
    "FrameMetric",
    "as_sequence",
    "frame_distance",
    "pair_distances",
    "validate_pair",
    "aligned_loss",
]


class FrameMetric(enum.Enum):
    """Distance between a single audio frame and a single text frame."""

    SQUARED_L2 = "sql2"
    L2 = "l2"
    L1 = "l1"

    @classmethod
    def parse(cls, value: Union[str, "FrameMetric", None]) -> "FrameMetric":
        if value is None:
            return cls.SQUARED_L2
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValidationError(f"unknown metric {value!r}; expected one of {names}") from None

    @property
    def scipy_name(self) -> str:
        return {"sql2": "sqeuclidean", "l2": "euclidean", "l1": "cityblock"}[self.value]


@dataclass(frozen=True, eq=False)
class EmbeddingSequence:
    """An ``(len, dim)`` float64 array of frames.

    The array is copied on construction and marked read-only, so instances
    can be shared freely.
    """

    frames: np.ndarray

    def __post_init__(self):
        arr = np.array(self.frames, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            # a bare list of scalars is a 1-D embedding per frame
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValidationError(f"expected a 2-D (frames, dim) array, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValidationError("embedding sequence must contain at least one frame")
        if arr.shape[1] < 1:
            raise ValidationError("embedding dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValidationError(f"non-finite value at frame {bad[0]}, component {bad[1]}")
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)

    @property
    def len(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def __len__(self) -> int:
        return self.frames.shape[0]

    def __getitem__(self, i):
        return self.frames[i]

    def __repr__(self) -> str:
        return f"EmbeddingSequence(len={self.len}, dim={self.dim})"


SequenceLike = Union[EmbeddingSequence, np.ndarray, Sequence]


def as_sequence(x: SequenceLike) -> EmbeddingSequence:
    if isinstance(x, EmbeddingSequence):
        return x
    return EmbeddingSequence(x)


@dataclass(frozen=True)
class Alignment:
    """Monotone non-decreasing map from audio frame ``i`` to text frame ``indices[i]``.

    Text frames may be repeated or skipped; there is no constraint on the
    first or last index.
    """

    indices: tuple
    m_text: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.m_text < 1:
            raise ValidationError("m_text must be positive")
        if len(idx) < 1:
            raise ValidationError("alignment must cover at least one audio frame")
        for pos, (a, b) in enumerate(zip(idx, idx[1:])):
            if b < a:
                raise ValidationError(f"alignment decreases at position {pos + 1}: {a} -> {b}")
        if idx[0] < 0:
            raise ValidationError("alignment indices must be non-negative")
        if idx[-1] >= self.m_text:
            raise AlignmentIndexError(f"index {idx[-1]} out of range for {self.m_text} text frames")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


def _check_vector(v: np.ndarray):
    if not np.all(np.isfinite(v)):
        raise ValidationError("non-finite component in frame vector")


def frame_distance(metric, u, v) -> float:
    """Distance between two frames under ``metric``."""
    metric = FrameMetric.parse(metric)
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise DimensionError(f"frame dimensions differ: {u.shape[0]} vs {v.shape[0]}")
    _check_vector(u)
    _check_vector(v)
    diff = u - v
    if metric is FrameMetric.SQUARED_L2:
        return float(np.dot(diff, diff))
    if metric is FrameMetric.L2:
        return float(np.sqrt(np.dot(diff, diff)))
    return float(np.sum(np.abs(diff)))


def pair_distances(metric: FrameMetric, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise distances between equally shaped ``(k, d)`` arrays."""
    diff = a - b
    if metric is FrameMetric.SQUARED_L2:
        return np.einsum("ij,ij->i", diff, diff)
    if metric is FrameMetric.L2:
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return np.abs(diff).sum(axis=1)


def validate_pair(audio: SequenceLike, text: SequenceLike):
    """Coerce both inputs to :class:`EmbeddingSequence` and check dimensions agree."""
    audio = as_sequence(audio)
    text = as_sequence(text)
    if audio.dim != text.dim:
        raise DimensionError(f"audio dim {audio.dim} != text dim {text.dim}")
    return audio, text


def _coerce_alignment(a, m_text: int) -> Alignment:
    if isinstance(a, Alignment):
        return a
    return Alignment(tuple(a), m_text)


def aligned_loss(audio, text, a, metric=FrameMetric.SQUARED_L2) -> float:
    """Mean frame distance between ``audio`` and ``text`` up-sampled along ``a``."""
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    idx = np.asarray(a.indices if isinstance(a, Alignment) else tuple(a), dtype=np.int64)
    if idx.ndim != 1 or idx.shape[0] != audio.len:
        raise LengthError(f"alignment has {idx.size} entries, audio has {audio.len} frames")
    if idx.size and (idx.max() >= text.len or idx.min() < 0):
        raise AlignmentIndexError(f"alignment index out of range for {text.len} text frames")
    a = _coerce_alignment(a, text.len)
    if a.m_text != text.len:
        raise LengthError(f"alignment built for {a.m_text} text frames, text has {text.len}")
    d = pair_distances(metric, audio.frames, text.frames[idx])
    return float(d.sum() / audio.len)
