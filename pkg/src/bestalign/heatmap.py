"""Distance-matrix images: plain PGM and SVG with the best path overlaid.

Images put audio frames on the horizontal axis and text frames on the
vertical axis, text frame 0 in the top row. Distances are min-max scaled to
0..255 with nearer pairs darker.
"""

from __future__ import annotations

import warnings

import numpy as np

__all__ = ["DegenerateRangeWarning", "gray_levels", "render_pgm", "render_svg"]

PATH_COLOR = "#ffd700"
CELL = 10


class DegenerateRangeWarning(UserWarning):
    pass


def gray_levels(D) -> np.ndarray:
    """Scale an ``(n, m)`` distance matrix to integer levels 0..255, same shape."""
    D = np.asarray(D, dtype=np.float64)
    lo, hi = D.min(), D.max()
    if hi == lo:
        warnings.warn("distance matrix is constant; rendering uniform mid-gray", DegenerateRangeWarning, stacklevel=2)
        return np.full(D.shape, 128, dtype=np.int64)
    return np.floor(255.0 * (D - lo) / (hi - lo) + 0.5).astype(np.int64)


def render_pgm(D) -> str:
    levels = gray_levels(D).T  # rows are text frames
    m, n = levels.shape
    lines = ["P2", f"{n} {m}", "255"]
    lines += [" ".join(str(v) for v in row) for row in levels]
    return "\n".join(lines) + "\n"


def render_svg(D, path=None) -> str:
    levels = gray_levels(D)
    n, m = levels.shape
    on_path = set()
    if path is not None:
        on_path = {(i, int(j)) for i, j in enumerate(path)}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{n * CELL}" height="{m * CELL}" '
        f'viewBox="0 0 {n * CELL} {m * CELL}">',
        f"<title>frame distances, {n} audio x {m} text</title>",
        '<g id="distances" shape-rendering="crispEdges">',
    ]
    for j in range(m):
        for i in range(n):
            v = levels[i, j]
            out.append(f'<rect x="{i * CELL}" y="{j * CELL}" width="{CELL}" height="{CELL}" fill="rgb({v},{v},{v})"/>')
    out.append("</g>")
    if on_path:
        out.append(f'<g id="best-alignment" fill="{PATH_COLOR}" shape-rendering="crispEdges">')
        for i, j in sorted(on_path):
            out.append(f'<rect x="{i * CELL}" y="{j * CELL}" width="{CELL}" height="{CELL}" data-audio="{i}" data-text="{j}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
