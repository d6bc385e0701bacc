"""Planted-alignment instances and a small gradient-descent demonstration."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .analysis import DEFAULT_N_PAIRS, baseline_stats, standardize
from .errors import DegenerateBaseline, DivergenceDetected, ValidationError
from .gradients import consistency_grad
from .seqcore import Alignment, EmbeddingSequence, FrameMetric, validate_pair

__all__ = [
    "PlantedInstance",
    "OptimizationTrace",
    "UpdateSide",
    "sample_monotone_path",
    "generate_planted",
    "optimize_embeddings",
]


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    audio: EmbeddingSequence
    text: EmbeddingSequence
    planted: Alignment
    noise_sigma: float
    seed: int


class UpdateSide(enum.Enum):
    AUDIO = "audio"
    TEXT = "text"
    BOTH = "both"


@dataclass(frozen=True, eq=False)
class OptimizationTrace:
    losses: List[float]
    z_best: List[float]
    steps: int
    learning_rate: float
    seed: int
    side: UpdateSide
    audio: np.ndarray = field(repr=False)
    text: np.ndarray = field(repr=False)


def sample_monotone_path(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """Uniform draw from the ``C(n+m-1, n)`` monotone sequences of length ``n`` over ``range(m)``.

    Stars and bars: a sorted ``n``-subset ``c`` of ``range(n+m-1)`` maps to
    ``c[i] - i``, a bijection onto non-decreasing sequences.
    """
    picks = np.sort(rng.choice(n + m - 1, size=n, replace=False))
    return picks - np.arange(n)


def generate_planted(n: int, m: int, d: int, noise_sigma: float = 0.0, seed: int = 42) -> PlantedInstance:
    """Text frames ~ N(0, 1); audio[i] = text[path[i]] + N(0, noise_sigma^2)."""
    if min(n, m, d) < 1:
        raise ValidationError("n, m and d must be positive")
    if noise_sigma < 0:
        raise ValidationError("noise_sigma must be non-negative")
    rng = np.random.default_rng(seed)
    text = rng.standard_normal((m, d))
    path = sample_monotone_path(rng, n, m)
    audio = text[path]
    if noise_sigma > 0:
        audio = audio + noise_sigma * rng.standard_normal((n, d))
    return PlantedInstance(
        audio=EmbeddingSequence(audio),
        text=EmbeddingSequence(text),
        planted=Alignment(tuple(path.tolist()), m),
        noise_sigma=float(noise_sigma),
        seed=seed,
    )


def optimize_embeddings(
    audio,
    text,
    metric=FrameMetric.SQUARED_L2,
    steps: int = 200,
    learning_rate: float = 0.05,
    update_side=UpdateSide.AUDIO,
    seed: int = 42,
    n_pairs: int = DEFAULT_N_PAIRS,
) -> OptimizationTrace:
    """Plain gradient descent on the best-alignment loss, directly on the embeddings.

    The baseline for ``z_best`` is re-estimated at every step with the same
    seed, so the trace follows the loss rather than sampling noise. Raises
    :class:`DivergenceDetected` once the loss exceeds 10x its starting value.
    """
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    if metric is not FrameMetric.SQUARED_L2:
        raise ValidationError("the optimisation demo only supports the squared L2 metric")
    if steps < 1:
        raise ValidationError("steps must be at least 1")
    if not learning_rate > 0:
        raise ValidationError("learning_rate must be positive")
    side = UpdateSide(update_side)

    a = audio.frames.copy()
    t = text.frames.copy()
    losses, zs = [], []
    initial = None
    for step in range(steps + 1):
        g = consistency_grad(a, t, metric)
        if initial is None:
            initial = g.loss
        elif g.loss > 10.0 * initial:
            raise DivergenceDetected(step, g.loss, initial)
        losses.append(g.loss)
        try:
            zs.append(standardize(g.loss, baseline_stats(a, t, metric, n_pairs, seed)))
        except DegenerateBaseline:
            zs.append(float("nan"))
        if step == steps:
            break
        if side in (UpdateSide.AUDIO, UpdateSide.BOTH):
            a = a - learning_rate * g.d_audio
        if side in (UpdateSide.TEXT, UpdateSide.BOTH):
            t = t - learning_rate * g.d_text
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(t))):
            raise DivergenceDetected(step + 1, float("inf"), initial)
    return OptimizationTrace(
        losses=losses,
        z_best=zs,
        steps=steps,
        learning_rate=float(learning_rate),
        seed=seed,
        side=side,
        audio=a,
        text=t,
    )
