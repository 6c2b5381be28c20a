"""Deterministic SVG drawings of layouts and planar regions."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np

from .geometry import ConvexRegion, GeometryError, clip_polygon
from .petal import Layout, PlacedFace
from .regions import FanRegion

__all__ = ["emit_svg", "default_viewport"]

_FILL = {"base": "#d9d9d9", "top": "#f4c542", "B": "#8fb8de", "A": "#9ed39a", "V": "#e06666", "D": "#6d9eeb", "S": "#bbbbbb"}


def _fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _path(P: np.ndarray) -> str:
    pts = [f"{_fmt(x)} {_fmt(y)}" for x, y in P]
    return "M " + " L ".join(pts) + " Z"


def _items(obj) -> list:
    if isinstance(obj, Layout):
        return list(obj.faces)
    if isinstance(obj, (PlacedFace, FanRegion, ConvexRegion)):
        return [obj]
    return list(obj)


def default_viewport(items, margin: float = 0.1) -> tuple[float, float, float, float]:
    """Bounding box (xmin, ymin, xmax, ymax) of the finite data, padded by ``margin`` of its size."""
    pts = []
    for it in items:
        if isinstance(it, PlacedFace):
            pts.append(it.coords)
        elif isinstance(it, FanRegion):
            pts.append(np.array([it.apex, it.a_left, it.a_right]))
    if not pts:
        raise GeometryError("nothing finite to frame")
    P = np.vstack(pts)
    lo, hi = P.min(axis=0), P.max(axis=0)
    pad = margin * float(max(hi - lo)) + 1e-9
    return (lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad)


def _box_polygon(vp) -> np.ndarray:
    x0, y0, x1, y1 = vp
    return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], dtype=float)


def _kind(name: str) -> str:
    if name in ("base", "top"):
        return name
    return name[0]


def emit_svg(obj, viewport: tuple[float, float, float, float] | None = None) -> bytes:
    """SVG 1.1 document with one ``path`` per face or region.

    Accepts a Layout, a placed face, a region, or a list mixing them.
    Regions are clipped to ``viewport`` and marked ``data-clipped="true"``;
    a multi-piece region is drawn as one path with a subpath per piece.
    """
    items = _items(obj)
    if not items:
        raise GeometryError("empty layout")
    vp = viewport or default_viewport(items)
    x0, y0, x1, y1 = vp
    w, h = x1 - x0, y1 - y0
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(w)} {_fmt(h)}">',
        '<g transform="scale(1,-1)" stroke="#000000" stroke-linejoin="round" '
        f'stroke-width="{_fmt(0.002 * max(w, h))}" fill-opacity="0.6">',
    ]
    for k, it in enumerate(items):
        if isinstance(it, PlacedFace):
            name, d, clipped = it.name, _path(it.coords), False
        else:
            name = it.name if isinstance(it, FanRegion) else (it.label or f"region{k + 1}")
            pieces = it.pieces if isinstance(it, FanRegion) else (it,)
            subs = []
            for piece in pieces:
                P = clip_polygon(_box_polygon(vp), piece.halfplanes)
                if len(P) >= 3:
                    subs.append(_path(P))
            d, clipped = " ".join(subs), True
        fill = _FILL.get(_kind(name), "#cccccc")
        attrs = f"id={quoteattr('face-' + name)} data-face={quoteattr(name)} fill=\"{fill}\""
        if clipped:
            attrs += ' data-clipped="true"'
        out.append(f'<path {attrs} d="{d}"/>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
