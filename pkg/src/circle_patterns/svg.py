"""Deterministic SVG rendering of a laid-out circle pattern."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MARGIN = 0.05


@dataclass(frozen=True)
class SvgOptions:
    draw_edges: bool = True
    circle_stroke: str = "#1f4e79"
    circle_fill: str = "#9ecae1"
    fill_opacity: float = 0.35
    edge_stroke: str = "#555555"
    pixel_width: int = 800


def _num(x: float) -> str:
    # 9 significant digits; "+ 0.0" folds negative zero.
    return f"{float(x) + 0.0:.9g}"


def render_svg(centers: np.ndarray, radii: np.ndarray, edges=None, options: SvgOptions | None = None) -> str:
    """One ``<circle>`` per vertex in index order, optional ``<line>`` per edge.

    The y axis is flipped so the picture keeps the mathematical orientation.
    The view box is the bounding box of all circles padded on every side by
    5% of its larger half-extent.
    """
    opts = options or SvgOptions()
    centers = np.asarray(centers, dtype=float)
    radii = np.asarray(radii, dtype=float)
    x, y = centers[:, 0], -centers[:, 1]
    lo_x, hi_x = float(np.min(x - radii)), float(np.max(x + radii))
    lo_y, hi_y = float(np.min(y - radii)), float(np.max(y + radii))
    pad = MARGIN * 0.5 * max(hi_x - lo_x, hi_y - lo_y)
    vb = (lo_x - pad, lo_y - pad, (hi_x - lo_x) + 2 * pad, (hi_y - lo_y) + 2 * pad)
    stroke = _num(0.004 * max(vb[2], vb[3]))
    height = max(1, round(opts.pixel_width * vb[3] / vb[2]))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{opts.pixel_width}" height="{height}" '
        f'viewBox="{" ".join(_num(v) for v in vb)}">',
        f'<g fill="{opts.circle_fill}" fill-opacity="{_num(opts.fill_opacity)}" stroke="{opts.circle_stroke}" '
        f'stroke-width="{stroke}">',
    ]
    for i in range(len(radii)):
        out.append(f'<circle id="v{i}" cx="{_num(x[i])}" cy="{_num(y[i])}" r="{_num(radii[i])}"/>')
    out.append("</g>")
    if opts.draw_edges and edges is not None and len(edges):
        out.append(f'<g stroke="{opts.edge_stroke}" stroke-width="{stroke}">')
        for a, b in edges:
            out.append(f'<line x1="{_num(x[a])}" y1="{_num(y[a])}" x2="{_num(x[b])}" y2="{_num(y[b])}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
