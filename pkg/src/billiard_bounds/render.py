"""Static SVG drawings of solution sets (plane curves and surfaces in R^3)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import UnsupportedAmbientDim
from .geometry import EmbeddedManifold

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
SIZE = 480
MARGIN = 40


def _view(n: int) -> np.ndarray:
    if n == 2:
        return np.eye(2)
    az, el = math.radians(35.0), math.radians(25.0)
    rz = np.array([[math.cos(az), -math.sin(az), 0], [math.sin(az), math.cos(az), 0], [0, 0, 1]])
    rx = np.array([[1, 0, 0], [0, math.cos(el), -math.sin(el)], [0, math.sin(el), math.cos(el)]])
    return (rx @ rz)[[0, 2]]


def _outline(M: EmbeddedManifold, samples: int = 400) -> list[np.ndarray]:
    m = M.intrinsic_dim
    if m == 1:
        u = np.linspace(0, 1, samples)[:, None]
        return [M.embed(M.chart_from_unit(u))]
    curves = []
    grid = np.linspace(0, 1, samples // 4)
    for fixed in np.linspace(0.02, 0.98, 12):
        for axis in range(2):
            u = np.full((grid.size, 2), fixed)
            u[:, axis] = grid
            curves.append(M.embed(M.chart_from_unit(u)))
    return curves


def render_svg(M: EmbeddedManifold, solutions, path=None, title: str = "") -> str:
    """SVG outline of M with every solution polygon; written to ``path`` if given.

    ``solutions`` is a sequence of objects with ``config``, ``length`` and
    ``morse_index`` (TrajectorySolution) or equivalent dicts.
    """
    n = M.ambient_dim
    if n > 3 or M.intrinsic_dim > 2:
        raise UnsupportedAmbientDim(f"cannot draw a manifold in R^{n}")
    P = _view(n)
    outline = [c @ P.T for c in _outline(M)]
    polys = []
    for sol in solutions:
        if isinstance(sol, dict):
            pts, length, index = np.asarray(sol["ambient_points"]), sol["length"], sol["morse_index"]
            degenerate = sol.get("degenerate", False)
        else:
            pts, length, index = sol.config.ambient(M), sol.length, sol.morse_index
            degenerate = sol.degenerate
        polys.append((pts @ P.T, length, index, degenerate))

    allpts = np.concatenate(outline + [p for p, *_ in polys]) if polys else np.concatenate(outline)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    scale = (SIZE - 2 * MARGIN) / max(float(np.max(hi - lo)), 1e-12)

    def xy(p):
        return MARGIN + (p[0] - lo[0]) * scale, SIZE - MARGIN - (p[1] - lo[1]) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE + 20 * len(polys)}">',
        f"<title>{escape(title)}</title>",
    ]
    for curve in outline:
        pts = " ".join("%.2f,%.2f" % xy(p) for p in curve)
        out.append(f'<polyline class="manifold" points="{pts}" fill="none" stroke="#999" stroke-width="0.8"/>')
    for i, (pts2, length, index, degenerate) in enumerate(polys):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join("%.2f,%.2f" % xy(p) for p in pts2)
        dash = ' stroke-dasharray="4,3"' if degenerate else ""
        out.append(f'<polygon class="trajectory" points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>')
        for p in pts2:
            cx, cy = xy(p)
            out.append(f'<circle class="vertex" cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{color}"/>')
        label = f"#{i + 1}: length {length:.6f}, index {index}" + (" (degenerate)" if degenerate else "")
        out.append(
            f'<text x="{MARGIN}" y="{SIZE + 20 * i + 5}" font-family="monospace" font-size="12" fill="{color}">{escape(label)}</text>'
        )
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
