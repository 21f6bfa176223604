"""Minimal static SVG figures: traced curves, polylines and marked points."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polycore import Poly


def trace_implicit(f: Poly, bbox, resolution: int = 240):
    """Line segments approximating the real zero set of ``f`` in ``bbox``.

    Plain marching squares on a uniform grid, with linear interpolation
    along cell edges.
    """
    x0, x1, y0, y1 = bbox
    xs = np.linspace(x0, x1, resolution + 1)
    ys = np.linspace(y0, y1, resolution + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    values = np.asarray(f.numeric()(gx, gy), dtype=float) * np.ones_like(gx)

    def cross(pa, pb, va, vb):
        t = va / (va - vb)
        return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

    segments = []
    for j in range(resolution):
        for i in range(resolution):
            corners = [(xs[i], ys[j]), (xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1])]
            vals = [values[j, i], values[j, i + 1], values[j + 1, i + 1], values[j + 1, i]]
            hits = []
            for k in range(4):
                va, vb = vals[k], vals[(k + 1) % 4]
                if (va > 0) != (vb > 0):
                    hits.append(cross(corners[k], corners[(k + 1) % 4], va, vb))
            for a, b in zip(hits[::2], hits[1::2]):
                if a != b:
                    segments.append((a, b))
    return segments


@dataclass
class Figure:
    bbox: tuple
    size: int = 480
    elements: list = field(default_factory=list)

    def _map(self, p):
        x0, x1, y0, y1 = self.bbox
        sx = (p[0] - x0) / (x1 - x0) * self.size
        sy = (y1 - p[1]) / (y1 - y0) * self.size
        return f"{sx:.3f},{sy:.3f}"

    def segments(self, segs, color="black", width=1.2):
        if not segs:
            return
        d = " ".join(f"M{self._map(a)} L{self._map(b)}" for a, b in segs)
        self.elements.append(f'<path d="{d}" stroke="{color}" stroke-width="{width}" fill="none"/>')

    def polyline(self, points, color="black", width=1.2, closed=False):
        pts = " ".join(self._map(p) for p in points)
        tag = "polygon" if closed else "polyline"
        self.elements.append(f'<{tag} points="{pts}" stroke="{color}" stroke-width="{width}" fill="none"/>')

    def points(self, points, color="red", radius=2.5):
        for p in points:
            cx, cy = self._map(p).split(",")
            self.elements.append(f'<circle cx="{cx}" cy="{cy}" r="{radius}" fill="{color}"/>')

    def to_string(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">')
        body = "\n".join(self.elements)
        return f'{head}\n<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_string())
