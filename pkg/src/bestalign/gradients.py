"""Pass-through gradient of the best-alignment loss and a finite-difference check.

The optimal alignment is found first and then held fixed; the gradient is
that of the fixed-alignment loss. Away from argmin ties this equals the true
gradient of the min-over-alignments loss, which is what
:func:`finite_difference_check` verifies numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dp_align import solve_optimized
from .errors import NonDifferentiablePoint
from .seqcore import Alignment, FrameMetric, validate_pair

__all__ = ["GradientPair", "FiniteDifferenceReport", "consistency_grad", "finite_difference_check", "relative_error"]


@dataclass(frozen=True, eq=False)
class GradientPair:
    d_audio: np.ndarray  # (n, d)
    d_text: np.ndarray  # (m, d)
    loss: float
    path: Alignment


@dataclass(frozen=True)
class FiniteDifferenceReport:
    max_rel_error: float
    max_abs_error: float
    n_checked: int
    tie_proximal: bool
    step: float


def _pair_grad(metric: FrameMetric, diff: np.ndarray) -> np.ndarray:
    """Gradient of metric(u, v) w.r.t. u, given rows ``diff = u - v``."""
    if metric is FrameMetric.SQUARED_L2:
        return 2.0 * diff
    if metric is FrameMetric.L2:
        norms = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        if np.any(norms == 0.0):
            i = int(np.flatnonzero(norms == 0.0)[0])
            raise NonDifferentiablePoint(f"L2 distance is zero at aligned audio frame {i}")
        return diff / norms[:, None]
    if np.any(diff == 0.0):
        i, k = np.argwhere(diff == 0.0)[0]
        raise NonDifferentiablePoint(f"L1 term has zero difference at audio frame {i}, component {k}")
    return np.sign(diff)


def consistency_grad(audio, text, metric=FrameMetric.SQUARED_L2) -> GradientPair:
    """Gradients of the best-alignment loss w.r.t. both sequences, alignment held fixed."""
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    best = solve_optimized(audio, text, metric)
    idx = best.path.as_array()
    diff = audio.frames - text.frames[idx]
    g = _pair_grad(metric, diff) / audio.len
    d_text = np.zeros_like(text.frames)
    np.add.at(d_text, idx, -g)
    return GradientPair(d_audio=g, d_text=d_text, loss=best.loss, path=best.path)


def relative_error(analytic, numeric, floor: float = 1e-12):
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / scale


def finite_difference_check(
    audio,
    text,
    metric=FrameMetric.SQUARED_L2,
    step: float = 1e-5,
    max_components: int = 2000,
    seed: int = 0,
) -> FiniteDifferenceReport:
    """Compare :func:`consistency_grad` with central differences of the full loss.

    Every component of both sequences is perturbed unless there are more than
    ``max_components``, in which case a seeded random subset is used.
    ``tie_proximal`` is set when any perturbation changes the optimal path.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    grad = consistency_grad(audio, text, metric)
    base = [audio.frames.copy(), text.frames.copy()]
    analytic = [grad.d_audio, grad.d_text]

    coords = [(s, i, k) for s in (0, 1) for i in range(base[s].shape[0]) for k in range(base[s].shape[1])]
    if len(coords) > max_components:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(coords), size=max_components, replace=False))
        coords = [coords[p] for p in pick]

    tie = False
    num = np.empty(len(coords))
    ana = np.empty(len(coords))
    for c, (s, i, k) in enumerate(coords):
        vals = []
        for sign in (1.0, -1.0):
            arrs = [base[0].copy(), base[1].copy()]
            arrs[s][i, k] += sign * step
            r = solve_optimized(arrs[0], arrs[1], metric)
            if r.path != grad.path:
                tie = True
            vals.append(r.loss)
        num[c] = (vals[0] - vals[1]) / (2.0 * step)
        ana[c] = analytic[s][i, k]

    rel = relative_error(ana, num)
    return FiniteDifferenceReport(
        max_rel_error=float(rel.max()) if rel.size else 0.0,
        max_abs_error=float(np.abs(ana - num).max()) if rel.size else 0.0,
        n_checked=len(coords),
        tie_proximal=tie,
        step=step,
    )
