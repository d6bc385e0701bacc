"""Best monotone alignment between an audio and a text embedding sequence.

``C[i, j]`` is the smallest summed frame distance over alignments of audio
frames ``0..i`` whose indices are all ``<= j``::

    C[0, j] = min_{k <= j} D[0, k]
    C[i, j] = min_{k <= j} C[i-1, k] + D[i, k]

and the loss is ``C[n-1, m-1] / n``. Three solvers share this definition:

* :func:`brute_force_best` enumerates every monotone index sequence,
* :func:`solve_naive` evaluates the recurrence with a full inner scan (O(nm^2)),
* :func:`solve_optimized` keeps a running prefix minimum (O(nm)).

Every argmin keeps the smallest text index ``k``. The optimal alignments
are closed under element-wise min and max (the two sums add up to the same
total), so their element-wise minimum is optimal too; backtracking with the
smallest-``k`` rule lands on it, and it is also the lexicographically
smallest optimal sequence that :func:`brute_force_best` returns. All three
solvers sum distances in the same order, so equal paths give bit-identical
losses.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np
from scipy.spatial.distance import cdist

from .errors import InstanceTooLarge
from .seqcore import Alignment, EmbeddingSequence, FrameMetric, validate_pair

__all__ = [
    "Solver",
    "CostMatrix",
    "BestAlignmentResult",
    "distance_matrix",
    "cost_matrix",
    "count_alignments",
    "brute_force_best",
    "solve_naive",
    "solve_optimized",
    "solve",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_ENUMERATION_CAP = 10**6
# rows of the distance matrix materialised at once in loss-only mode
_LOSS_ONLY_CELLS = 1 << 20


class Solver(enum.Enum):
    NAIVE = "naive"
    OPTIMIZED = "optimized"
    BRUTE_FORCE = "brute"


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """The filled DP table, shape ``(n_audio, m_text)``."""

    values: np.ndarray

    @property
    def n_audio(self) -> int:
        return self.values.shape[0]

    @property
    def m_text(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class BestAlignmentResult:
    loss: float
    path: Optional[Alignment]  # None in loss-only mode
    solver: Solver
    n_audio: int
    m_text: int
    dim: int
    metric: FrameMetric


def distance_matrix(audio, text, metric=FrameMetric.SQUARED_L2) -> np.ndarray:
    """``(n, m)`` matrix of frame distances, entry ``(i, j)`` for audio ``i`` and text ``j``."""
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    return cdist(audio.frames, text.frames, metric.scipy_name)


# --- kernels -------------------------------------------------------------


@numba.njit(cache=True)
def _fill_naive(D, cost, back):
    n, m = D.shape
    for j in range(m):
        best = np.inf
        bk = -1
        for k in range(j + 1):
            v = D[0, k]
            if v < best:
                best = v
                bk = k
        cost[0, j] = best
        back[0, j] = bk
    for i in range(1, n):
        for j in range(m):
            best = np.inf
            bk = -1
            for k in range(j + 1):
                v = cost[i - 1, k] + D[i, k]
                if v < best:
                    best = v
                    bk = k
            cost[i, j] = best
            back[i, j] = bk


@numba.njit(cache=True)
def _fill_optimized(D, back, prev, cur):
    n, m = D.shape
    best = np.inf
    for j in range(m):
        v = D[0, j]
        if v < best:
            best = v
            back[0, j] = j
        else:
            back[0, j] = back[0, j - 1]
        prev[j] = best
    for i in range(1, n):
        best = np.inf
        bk = -1
        for j in range(m):
            v = prev[j] + D[i, j]
            if v < best:
                best = v
                bk = j
            cur[j] = best
            back[i, j] = bk
        for j in range(m):
            prev[j] = cur[j]
    return prev[m - 1]


@numba.njit(cache=True)
def _advance_rows(D, prev, first):
    """Push the running cost row through a block of distance rows, values only."""
    n, m = D.shape
    start = 0
    if first:
        best = np.inf
        for j in range(m):
            if D[0, j] < best:
                best = D[0, j]
            prev[j] = best
        start = 1
    for i in range(start, n):
        best = np.inf
        for j in range(m):
            v = prev[j] + D[i, j]
            if v < best:
                best = v
            prev[j] = best


@numba.njit(cache=True)
def _backtrack(back):
    n, m = back.shape
    path = np.empty(n, dtype=np.int64)
    path[n - 1] = back[n - 1, m - 1]
    for i in range(n - 2, -1, -1):
        path[i] = back[i, path[i + 1]]
    return path


# --- public solvers ------------------------------------------------------


def _result(loss, path, solver, audio, text, metric):
    alignment = None if path is None else Alignment(tuple(path.tolist()), text.len)
    return BestAlignmentResult(
        loss=float(loss),
        path=alignment,
        solver=solver,
        n_audio=audio.len,
        m_text=text.len,
        dim=audio.dim,
        metric=metric,
    )


def count_alignments(n: int, m: int) -> int:
    """Number of monotone non-decreasing length-``n`` sequences over ``range(m)``."""
    return math.comb(n + m - 1, n)


def brute_force_best(audio, text, metric=FrameMetric.SQUARED_L2, cap: int = DEFAULT_ENUMERATION_CAP):
    """Exhaustive minimum over every legal alignment.

    Candidates are generated in lexicographic order, so the first minimum
    found is the lexicographically smallest optimal alignment.
    """
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    n, m = audio.len, text.len
    total = count_alignments(n, m)
    if total > cap:
        raise InstanceTooLarge(f"{total} alignments for n={n}, m={m} exceeds cap {cap}")
    D = distance_matrix(audio, text, metric)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations_with_replacement(range(m), n)),
        dtype=np.int64,
        count=total * n,
    )
    candidates = flat.reshape(total, n)
    # accumulate frame by frame so the summation order matches the DP
    sums = D[0, candidates[:, 0]].copy()
    for i in range(1, n):
        sums += D[i, candidates[:, i]]
    best = int(np.argmin(sums))
    return _result(sums[best] / n, candidates[best], Solver.BRUTE_FORCE, audio, text, metric)


def _naive_tables(D):
    n, m = D.shape
    cost = np.empty((n, m), dtype=np.float64)
    back = np.empty((n, m), dtype=np.int64)
    _fill_naive(D, cost, back)
    return cost, back


def cost_matrix(audio, text, metric=FrameMetric.SQUARED_L2) -> CostMatrix:
    """The full DP table as filled by :func:`solve_naive`."""
    D = distance_matrix(audio, text, metric)
    cost, _ = _naive_tables(D)
    return CostMatrix(cost)


def solve_naive(audio, text, metric=FrameMetric.SQUARED_L2) -> BestAlignmentResult:
    """Best alignment by the recurrence with an explicit O(m) scan per cell."""
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    D = distance_matrix(audio, text, metric)
    cost, back = _naive_tables(D)
    path = _backtrack(back)
    return _result(cost[-1, -1] / audio.len, path, Solver.NAIVE, audio, text, metric)


def solve_optimized(audio, text, metric=FrameMetric.SQUARED_L2, *, loss_only: bool = False) -> BestAlignmentResult:
    """Best alignment in O(nm) time via a running prefix minimum.

    With ``loss_only=True`` only two cost rows and a bounded block of the
    distance matrix are kept in memory and ``path`` is ``None``.
    """
    audio, text = validate_pair(audio, text)
    metric = FrameMetric.parse(metric)
    n, m = audio.len, text.len
    prev = np.empty(m, dtype=np.float64)
    if loss_only:
        block = max(1, _LOSS_ONLY_CELLS // m)
        for start in range(0, n, block):
            D = cdist(audio.frames[start : start + block], text.frames, metric.scipy_name)
            _advance_rows(D, prev, start == 0)
        return _result(prev[-1] / n, None, Solver.OPTIMIZED, audio, text, metric)
    D = distance_matrix(audio, text, metric)
    back = np.empty((n, m), dtype=np.int64)
    total = _fill_optimized(D, back, prev, np.empty(m, dtype=np.float64))
    return _result(total / n, _backtrack(back), Solver.OPTIMIZED, audio, text, metric)


def solve(audio, text, metric=FrameMetric.SQUARED_L2, solver=Solver.OPTIMIZED) -> BestAlignmentResult:
    solver = Solver(solver)
    if solver is Solver.NAIVE:
        return solve_naive(audio, text, metric)
    if solver is Solver.BRUTE_FORCE:
        return brute_force_best(audio, text, metric)
    return solve_optimized(audio, text, metric)
