"""Wall-clock scaling of the naive and optimised solvers."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .dp_align import solve_naive, solve_optimized


@dataclass(frozen=True)
class BenchRow:
    n: int
    m: int
    d: int
    naive_ms: float
    optimized_ms: float
    agree: bool


def _median_ms(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def run_bench(ns: Sequence[int], ms: Sequence[int], d: int = 64, reps: int = 5, seed: int = 42) -> List[BenchRow]:
    # compile the kernels before any timing
    solve_naive(np.zeros((2, 1)), np.ones((2, 1)))
    solve_optimized(np.zeros((2, 1)), np.ones((2, 1)))
    rows = []
    for n in ns:
        for m in ms:
            rng = np.random.default_rng([seed, n, m])
            audio = rng.standard_normal((n, d))
            text = rng.standard_normal((m, d))
            naive = solve_naive(audio, text)
            opt = solve_optimized(audio, text)
            agree = abs(naive.loss - opt.loss) <= 1e-12 * max(abs(naive.loss), 1e-300) and naive.path == opt.path
            rows.append(
                BenchRow(
                    n=n,
                    m=m,
                    d=d,
                    naive_ms=_median_ms(lambda: solve_naive(audio, text), reps),
                    optimized_ms=_median_ms(lambda: solve_optimized(audio, text), reps),
                    agree=agree,
                )
            )
    return rows


def slopes_in_m(rows: List[BenchRow]) -> Dict[int, Dict[str, float]]:
    """Per fixed ``n``, log-log slope of median time against ``m`` for each solver."""
    out = {}
    for n in sorted({r.n for r in rows}):
        sub = [r for r in rows if r.n == n]
        if len({r.m for r in sub}) < 2:
            continue
        ms = [r.m for r in sub]
        out[n] = {
            "naive": loglog_slope(ms, [r.naive_ms for r in sub]),
            "optimized": loglog_slope(ms, [r.optimized_ms for r in sub]),
        }
    return out
